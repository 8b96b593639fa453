#include "bykov/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bykov/common.hpp"
#include "bykov/horseshoe.hpp"
#include "bykov/returncurve.hpp"

namespace bykov {

using ojson = nlohmann::ordered_json;

FlowRun flow_run_from_json(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("<document>", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("<document>", "expected a JSON object");
    static const std::set<std::string> known{"alpha1", "alpha2", "lambda", "model", "x0", "T"};
    for (const auto& item : doc.items()) {
        if (!known.count(item.key())) throw ValidationError(item.key(), "unknown key");
    }
    auto number = [&doc](const char* key) {
        if (!doc.contains(key)) throw ValidationError(key, "missing");
        if (!doc.at(key).is_number()) throw ValidationError(key, "must be a number");
        return doc.at(key).get<double>();
    };

    FlowRun run;
    run.model.alpha1 = number("alpha1");
    run.model.alpha2 = number("alpha2");
    if (doc.contains("lambda")) run.model.lambda = number("lambda");
    if (doc.contains("model")) {
        if (!doc.at("model").is_string()) throw ValidationError("model", "must be a string");
        run.model.model = model_from_string(doc.at("model").get<std::string>());
    }
    if (doc.contains("T")) run.T = number("T");
    if (doc.contains("x0")) {
        const auto& x = doc.at("x0");
        const std::size_t want = run.model.model == Model::Dim3 ? 3 : 4;
        if (!x.is_array() || x.size() != want) {
            throw ValidationError("x0", "must be an array of " + std::to_string(want) + " numbers");
        }
        run.x0 = State{0.0, 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < want; ++i) {
            if (!x[i].is_number()) throw ValidationError("x0", "must contain numbers only");
            run.x0[i] = x[i].get<double>();
        }
    }
    run.model.validate();
    if (!(run.T > 0.0)) throw ValidationError("T", "must be positive");
    return run;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file_atomic(const std::string& path, std::string_view content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

namespace {

class VerifyFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("config", "cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& header) { body_ << header << '\n'; }
    template <class... Ts>
    void row(const Ts&... cols) {
        bool first = true;
        ((body_ << (first ? "" : ",") << cell(cols), first = false), ...);
        body_ << '\n';
    }
    std::string str() const { return body_.str(); }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(std::string_view v) { return std::string(v); }
    static std::string cell(const char* v) { return v; }
    static std::string cell(char v) { return std::string(1, v); }
    std::ostringstream body_;
};

struct Globals {
    std::string config;
    std::string out_dir = ".";
    bool verify = false;
    double rtol = 1e-10;
    double atol = 1e-30;
    std::uint64_t seed = 12345;
};

// Collects the files of one command and writes its manifest.
class Run {
public:
    Run(std::string command, const Globals& g)
        : command_(std::move(command)), g_(g), start_(std::chrono::steady_clock::now()) {
        std::filesystem::create_directories(g_.out_dir);
        if (!g_.config.empty()) config_text_ = read_text(g_.config);
    }

    const std::string& config_text() const {
        if (g_.config.empty()) throw ValidationError("config", "--config is required for " + command_);
        return config_text_;
    }

    void emit(const std::string& name, const std::string& content) {
        write_file_atomic((std::filesystem::path(g_.out_dir) / name).string(), content);
        outputs_.push_back(name);
    }

    ojson& diagnostics() { return diagnostics_; }
    ojson& tolerances() { return tolerances_; }

    void finish() {
        ojson m;
        m["command"] = command_;
        m["config"] = g_.config;
        m["config_digest"] = fnv1a_hex(config_text_);
        m["version"] = std::string(kVersion);
        tolerances_["rtol"] = g_.rtol;
        tolerances_["atol"] = g_.atol;
        m["tolerances"] = tolerances_;
        m["seed"] = g_.seed;
        m["verify"] = g_.verify;
        m["outputs"] = outputs_;
        m["diagnostics"] = diagnostics_;
        m["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_file_atomic((std::filesystem::path(g_.out_dir) / "manifest.json").string(), m.dump(2) + "\n");
    }

private:
    std::string command_;
    const Globals& g_;
    std::chrono::steady_clock::time_point start_;
    std::string config_text_;
    std::vector<std::string> outputs_;
    ojson diagnostics_ = ojson::object();
    ojson tolerances_ = ojson::object();
};

void require(bool ok, const std::string& what) {
    if (!ok) throw VerifyFailure(what);
}

ojson region_json(const Region& r, const AExtrema& ext) {
    ojson j;
    j["tag"] = std::string(to_string(r.tag));
    j["A_min"] = r.A_min;
    j["A_max"] = r.A_max;
    j["A_min_closed_form"] = ext.closed_form_min;
    j["A_max_closed_form"] = ext.closed_form_max;
    j["K"] = r.K;
    j["gamma"] = r.gamma;
    j["gamma_rational"] = {{"is_rational_within_tol", r.gamma_rationality.is_rational_within_tol},
                           {"p", r.gamma_rationality.p},
                           {"q", r.gamma_rationality.q},
                           {"error", r.gamma_rationality.error}};
    j["printed_inequality_in_B"] = r.printed_inequality_in_B;
    return j;
}

// --- saddle-model commands -------------------------------------------------

struct ClassifyArgs {
    double tol = 1e-9;
    std::int64_t q_max = 1000;
};

void cmd_classify(Run& run, const Globals& g, const ClassifyArgs& a, std::ostream& out) {
    const SaddleParams p = saddle_params_from_json(run.config_text());
    ClassifyOptions opts;
    opts.rationality_tol = a.tol;
    opts.q_max = a.q_max;
    const Region r = classify_region(p, opts);
    const AExtrema ext = A_extrema(p);
    const ojson j = region_json(r, ext);
    out << j.dump(2) << '\n';
    run.emit("region.json", j.dump(2) + "\n");
    run.diagnostics() = j;
    run.tolerances()["rationality_tol"] = a.tol;
    run.tolerances()["q_max"] = a.q_max;
    if (g.verify && p.a != 1.0) {
        const double scale = std::max(1.0, std::abs(ext.closed_form_max));
        require(std::abs(ext.A_min - ext.closed_form_min) < 1e-9 * scale, "A_min disagrees with its closed form");
        require(std::abs(ext.A_max - ext.closed_form_max) < 1e-9 * scale, "A_max disagrees with its closed form");
    }
}

struct CurveArgs {
    double t = 0.0;
    double s_min = 1e-6;
    double s_max = 0.0;
    int n = 200;
};

void cmd_curve(Run& run, const Globals& g, const CurveArgs& a) {
    const SaddleParams p = saddle_params_from_json(run.config_text());
    const DerivedConstants k = derive_constants(p);
    const double s_max = a.s_max > 0.0 ? a.s_max : p.eps;
    if (a.n < 1) throw ValidationError("n", "need at least one sample");
    if (!(a.s_min > 0.0) || !(a.s_min < s_max) || s_max > p.eps) {
        throw ValidationError("s_range", "need 0 < s_min < s_max <= eps");
    }
    CsvWriter csv("s,t,phi,x_w,x_w_mod_2pi,y_w,dxw_ds");
    double worst = 0.0;
    for (int i = 0; i < a.n; ++i) {
        const double frac = a.n == 1 ? 1.0 : static_cast<double>(i) / (a.n - 1);
        const double s = i == a.n - 1 ? s_max : std::exp(std::log(a.s_min) + frac * (std::log(s_max) - std::log(a.s_min)));
        const ReturnCurveSample e = eta(a.t, s, k);
        csv.row(e.s, e.t, e.phi, e.x_w, mod_two_pi(e.x_w), e.y_w, e.dxw_ds);
        if (g.verify) {
            const ReturnCurveSample c = eta_by_composition(a.t, s, k);
            worst = std::max({worst, std::abs(c.x_w - e.x_w), std::abs(c.y_w - e.y_w) / std::max(e.y_w, 1e-300)});
        }
    }
    run.emit("curve.csv", csv.str());
    run.diagnostics()["samples"] = a.n;
    if (g.verify) {
        run.diagnostics()["max_composition_error"] = worst;
        require(worst < 1e-9, "closed form and composition differ by " + num(worst));
    }
}

struct ReversalArgs {
    double t = 0.0;
    std::size_t n_max = 10000;
};

void cmd_reversals(Run& run, const Globals& g, const ReversalArgs& a) {
    const SaddleParams p = saddle_params_from_json(run.config_text());
    const DerivedConstants k = derive_constants(p);
    const ReversalSequence seq = reversal_sequence(a.t, a.n_max, p);
    CsvWriter csv("n,s,log_s,phi,x_w,x_w_mod_2pi,y_w,kind");
    for (std::size_t n = 0; n < seq.size(); ++n) {
        csv.row(n, seq.s_values[n], seq.log_s[n], seq.phi_values[n], seq.x_values[n], mod_two_pi(seq.x_values[n]),
                seq.y_values[n], to_string(seq.kinds[n]));
    }
    run.emit("reversals.csv", csv.str());
    run.diagnostics()["region"] = std::string(to_string(seq.region));
    run.diagnostics()["count"] = seq.size();
    run.diagnostics()["reason"] = seq.reason;
    run.diagnostics()["max_circle_gap"] = max_circle_gap(seq.x_values);
    if (g.verify) {
        const double K = reversal_level(p);
        for (std::size_t n = 0; n < seq.size(); ++n) {
            require(std::abs(A_of_phi(seq.phi_values[n], p) - K) < 1e-9 * std::max(1.0, K),
                    "reversal " + std::to_string(n) + " is off the level A = K");
            require(n == 0 || seq.s_values[n] < seq.s_values[n - 1], "reversal points not decreasing in s");
        }
        if (!seq.inflection) {
            for (std::size_t n = 0; n < seq.size(); ++n) {
                require(std::abs(scaled_dxw(seq.phi_values[n], k)) < 1e-8 * std::max(1.0, std::abs(k.g_v)),
                        "dx_w/ds does not vanish at reversal " + std::to_string(n));
            }
        }
    }
}

struct TangencyArgs {
    double x0 = 0.0;
    double t = 0.0;
    std::size_t n_max = 10000;
};

void cmd_tangency(Run& run, const Globals& g, const TangencyArgs& a) {
    const SaddleParams p = saddle_params_from_json(run.config_text());
    const TangencyReport rep = find_tangency(a.x0, a.t, a.n_max, p);
    ojson j;
    j["region"] = std::string(to_string(rep.region));
    j["index"] = rep.index;
    j["s"] = rep.s;
    j["x_w"] = rep.x_w;
    j["y_w"] = rep.y_w;
    j["distance"] = rep.distance;
    j["bump"] = {{"amplitude", rep.bump.amplitude},
                 {"center_x", rep.bump.center_x},
                 {"center_y", rep.bump.center_y},
                 {"radius", rep.bump.radius}};
    j["warning"] = rep.warning;
    ojson hist = ojson::array();
    for (const auto& [n, d] : rep.history) hist.push_back({{"n", n}, {"min_distance", d}});
    j["history"] = hist;
    run.emit("tangency.json", j.dump(2) + "\n");
    run.diagnostics() = j;
    if (g.verify) {
        const ReversalSequence seq = reversal_sequence(a.t, a.n_max, p);
        const double moved = rep.x_w + rep.bump(rep.x_w, rep.y_w);
        require(circle_distance(moved, a.x0) < 1e-12 * std::max(1.0, std::abs(rep.x_w)), "bump does not move the reversal onto x0");
        for (std::size_t n = 0; n < seq.size(); ++n) {
            if (n == rep.index) continue;
            require(rep.bump(seq.x_values[n], seq.y_values[n]) == 0.0,
                    "bump touches reversal point " + std::to_string(n));
        }
    }
}

struct StripArgs {
    double tau = 0.5;
    int n_limit = 10;
    int t_samples = 33;
};

void cmd_strips(Run& run, const Globals& g, const StripArgs& a) {
    const SaddleParams p = saddle_params_from_json(run.config_text());
    StripOptions opts;
    opts.t_samples = a.t_samples;
    const StripFamily fam = build_strips(std::min(a.tau, std::min(kPi, p.eps)), a.n_limit, p, opts);
    CsvWriter csv("n,t,a_n,b_n");
    for (const Strip& st : fam.strips)
        for (std::size_t j = 0; j < st.t.size(); ++j) csv.row(st.n, st.t[j], st.a[j], st.b[j]);
    run.emit("strips.csv", csv.str());
    run.diagnostics()["case"] = std::string(to_string(fam.strip_case));
    run.diagnostics()["region"] = std::string(to_string(fam.region));
    run.diagnostics()["tau_requested"] = a.tau;
    run.diagnostics()["tau"] = fam.tau;
    run.diagnostics()["strips"] = fam.strips.size();
    run.diagnostics()["note"] = fam.note;
    if (g.verify) {
        const StripCheck chk = check_strip_invariants(fam, p);
        run.diagnostics()["max_level_error"] = chk.max_level_error;
        require(chk.ok, chk.failures.empty() ? "strip invariants failed" : chk.failures.front());
    }
}

struct JacobianArgs {
    double x = 0.1;
    int k_min = 4;
    int k_max = 20;
    int random = 0;
};

void cmd_jacobian(Run& run, const Globals& g, const JacobianArgs& a) {
    const SaddleParams p = saddle_params_from_json(run.config_text());
    if (a.k_min > a.k_max) throw ValidationError("k_range", "need k_min <= k_max");
    std::vector<std::pair<double, double>> points;
    for (int kk = a.k_min; kk <= a.k_max; ++kk) {
        const double y = std::ldexp(1.0, -kk);
        if (y <= p.eps) points.emplace_back(a.x, y);
    }
    std::mt19937_64 rng(g.seed);
    std::uniform_real_distribution<double> ux(0.0, kTwoPi);
    std::uniform_real_distribution<double> uly(std::log(1e-4), std::log(p.eps));
    for (int i = 0; i < a.random; ++i) {
        const double x = ux(rng);
        points.emplace_back(x, std::exp(uly(rng)));
    }
    CsvWriter csv("x,y,det_fd,trace_fd,det_cf,trace_cf,class");
    std::size_t det_flags = 0;
    std::size_t trace_flags = 0;
    double worst_exact = 0.0;
    for (const auto& [x, y] : points) {
        const JacobianReport r = jacobian_report(x, y, p);
        csv.row(x, y, r.det_fd, r.trace_fd, r.det_cf, r.trace_cf, to_string(r.eigen_class));
        det_flags += r.det_discrepancy;
        trace_flags += r.trace_discrepancy;
        worst_exact = std::max(worst_exact, std::abs(r.det_fd - r.det_exact) / std::abs(r.det_exact));
    }
    run.emit("jacobian.csv", csv.str());
    run.diagnostics()["points"] = points.size();
    run.diagnostics()["det_discrepancies"] = det_flags;
    run.diagnostics()["trace_discrepancies"] = trace_flags;
    run.diagnostics()["max_rel_fd_vs_exact_det"] = worst_exact;
    run.tolerances()["closed_form_rel_tol"] = 1e-6;
    if (g.verify) require(worst_exact < 1e-5, "finite-difference det disagrees with the exact derivative");
}

struct MultipulseArgs {
    int n = 2;
    double x0 = 0.0;
    double s_min = 1e-12;
    double s_max = 0.0;
};

void cmd_multipulse(Run& run, const Globals& g, const MultipulseArgs& a) {
    const SaddleParams p = saddle_params_from_json(run.config_text());
    MultipulseOptions opts;
    opts.s_min = a.s_min;
    opts.s_max = a.s_max;
    const std::vector<PulsePoint> pts = find_multipulse(a.n, p, a.x0, opts);
    CsvWriter csv("n,s,residual,replay_residual");
    double worst = 0.0;
    for (const PulsePoint& pt : pts) {
        const double replay = replay_pulse(pt, p, a.x0);
        worst = std::max(worst, replay);
        csv.row(pt.n, pt.s, pt.residual, replay);
    }
    run.emit("multipulse.csv", csv.str());
    run.diagnostics()["points"] = pts.size();
    run.diagnostics()["max_replay_residual"] = worst;
    if (g.verify) require(worst < 1e-8, "pulse replay misses W^s(v) by " + num(worst));
}

// --- flow commands ----------------------------------------------------------

ojson spectrum_json(const EquilibriaSpectrum& sp) {
    auto node = [](const NodeSpectrum& n) {
        return ojson{{"focus_re", n.focus_re}, {"focus_im", n.focus_im}, {"real", n.real}, {"radial", n.radial}};
    };
    ojson j;
    j["v"] = node(sp.v);
    j["w"] = node(sp.w);
    j["saddle_params"] = {{"alpha_v", sp.saddle.alpha_v}, {"C_v", sp.saddle.C_v}, {"E_v", sp.saddle.E_v},
                          {"alpha_w", sp.saddle.alpha_w}, {"C_w", sp.saddle.C_w}, {"E_w", sp.saddle.E_w}};
    j["delta"] = sp.delta;
    return j;
}

TrajectorySeries run_flow(const FlowRun& fr, const Globals& g, bool renormalize) {
    IntegratorOptions io;
    io.rtol = g.rtol;
    io.atol = g.atol;
    io.renormalize = renormalize;
    return integrate(fr.x0, fr.T, fr.model, io);
}

void cmd_simulate(Run& run, const Globals& g, bool renormalize) {
    const FlowRun fr = flow_run_from_json(run.config_text());
    const TrajectorySeries s = run_flow(fr, g, renormalize);
    CsvWriter csv("t,x1,x2,x3,x4,r2");
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        const State& x = s.states[i];
        csv.row(s.times[i], x[0], x[1], x[2], x[3], x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
    }
    run.emit("trajectory.csv", csv.str());
    ojson& d = run.diagnostics();
    d["model"] = std::string(to_string(fr.model.model));
    d["samples"] = s.times.size();
    d["accepted_steps"] = s.accepted;
    d["rejected_steps"] = s.rejected;
    d["max_error_estimate"] = s.max_error_estimate;
    d["renormalized"] = s.renormalized;
    d["failed"] = s.failed;
    d["failure"] = s.failure;
    d["spectrum"] = spectrum_json(equilibria_spectrum(fr.model));
    ojson subspaces = ojson::array();
    for (const SubspaceResidual& r : invariant_subspace_residuals(s))
        subspaces.push_back({{"component", r.component + 1}, {"max_abs", r.max_abs}});
    d["invariant_subspaces"] = subspaces;
    bool identity_ok = true;
    if (fr.model.model != Model::Dim3) {
        const SphereResidual sr = sphere_residual(s);
        d["sphere_residual"] = sr.residual;
        d["sphere_band_tail"] = sr.band_tail;
        const ChiralityReport ch = chirality_check(s, fr.model);
        d["chirality"] = std::string(to_string(ch.verdict));
        d["chirality_message"] = ch.message;
        d["chirality_identity_residual"] = ch.identity_residual;
        identity_ok = ch.identity_residual < 1e-12;
        if (g.verify && !s.renormalized) require(sr.residual < 1e-7, "sphere residual " + num(sr.residual));
    }
    if (g.verify) {
        require(!s.failed, "integration failed: " + s.failure);
        require(identity_ok, "angular-velocity identity violated");
    }
}

struct SojournArgs {
    double radius = 0.3;
    std::size_t discard = 2;
};

void cmd_sojourn(Run& run, const Globals& g, const SojournArgs& a) {
    const FlowRun fr = flow_run_from_json(run.config_text());
    const TrajectorySeries s = run_flow(fr, g, false);
    const SojournReport rep = sojourn_analysis(s, a.radius, a.discard);
    CsvWriter csv("node,t_enter,t_exit,duration,complete");
    for (const Dwell& d : rep.dwells) csv.row(d.node, d.t_enter, d.t_exit, d.duration(), d.complete ? 1 : 0);
    run.emit("sojourn.csv", csv.str());
    const double delta = equilibria_spectrum(fr.model).delta;
    run.diagnostics()["dwells"] = rep.dwells.size();
    run.diagnostics()["ratios"] = rep.ratios;
    run.diagnostics()["median_ratio"] = rep.median_ratio;
    run.diagnostics()["delta"] = delta;
    run.diagnostics()["relative_error"] = std::abs(rep.median_ratio / delta - 1.0);
    run.tolerances()["ratio_rel_tol"] = 0.1;
    if (g.verify) {
        require(std::abs(rep.median_ratio / delta - 1.0) < 0.1,
                "median dwell ratio " + num(rep.median_ratio) + " not within 10% of delta");
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical toolkit for Bykov cycles with nodes of different chirality", "bykov"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Globals g;
    app.add_option("--config", g.config, "JSON configuration file");
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_flag("--verify", g.verify, "replay invariants and fail with exit code 1 on violation");
    app.add_option("--rtol", g.rtol, "relative tolerance of the integrator")->capture_default_str();
    app.add_option("--atol", g.atol, "absolute tolerance of the integrator")->capture_default_str();
    app.add_option("--seed", g.seed, "seed for sampling-based checks")->capture_default_str();

    ClassifyArgs classify_args;
    auto* classify = app.add_subcommand("classify", "parameter region of a saddle configuration");
    classify->add_option("--tol", classify_args.tol, "rationality tolerance for gamma");
    classify->add_option("--qmax", classify_args.q_max, "largest denominator tried for gamma");

    CurveArgs curve_args;
    auto* curve = app.add_subcommand("curve", "samples of the return curve eta along beta_t");
    curve->add_option("--t", curve_args.t);
    curve->add_option("--s-min", curve_args.s_min);
    curve->add_option("--s-max", curve_args.s_max, "defaults to eps");
    curve->add_option("--n", curve_args.n, "number of log-spaced samples");

    ReversalArgs rev_args;
    auto* reversals = app.add_subcommand("reversals", "points where x_w turns back");
    reversals->add_option("--t", rev_args.t);
    reversals->add_option("--n-max", rev_args.n_max);

    TangencyArgs tan_args;
    auto* tangency = app.add_subcommand("tangency", "bump that creates a heteroclinic tangency");
    tangency->add_option("--x0", tan_args.x0, "angle of W^s(v) on Out(w)");
    tangency->add_option("--t", tan_args.t);
    tangency->add_option("--n-max", tan_args.n_max);

    StripArgs strip_args;
    auto* strips = app.add_subcommand("strips", "horizontal strips of the return map");
    strips->add_option("--tau", strip_args.tau);
    strips->add_option("--n-limit", strip_args.n_limit);
    strips->add_option("--t-samples", strip_args.t_samples);

    JacobianArgs jac_args;
    auto* jacobian = app.add_subcommand("jacobian", "Jacobian of the return map along y = 2^-k");
    jacobian->add_option("--x", jac_args.x);
    jacobian->add_option("--k-min", jac_args.k_min);
    jacobian->add_option("--k-max", jac_args.k_max);
    jacobian->add_option("--random", jac_args.random, "extra random points (uses --seed)");

    MultipulseArgs mp_args;
    auto* multipulse = app.add_subcommand("multipulse", "n-pulse heteroclinic connections");
    multipulse->add_option("--n", mp_args.n);
    multipulse->add_option("--x0", mp_args.x0);
    multipulse->add_option("--s-min", mp_args.s_min);
    multipulse->add_option("--s-max", mp_args.s_max, "defaults to eps");

    bool renormalize = false;
    auto* simulate = app.add_subcommand("simulate", "integrate the explicit vector field");
    simulate->add_flag("--renormalize", renormalize, "project onto the unit sphere after every step");

    SojournArgs soj_args;
    auto* sojourn = app.add_subcommand("sojourn", "dwell times near the saddle-foci");
    sojourn->add_option("--radius", soj_args.radius);
    sojourn->add_option("--discard", soj_args.discard, "transient dwells ignored in the ratios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion& e) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        Run run(sub->get_name(), g);
        try {
            if (sub == classify) cmd_classify(run, g, classify_args, out);
            else if (sub == curve) cmd_curve(run, g, curve_args);
            else if (sub == reversals) cmd_reversals(run, g, rev_args);
            else if (sub == tangency) cmd_tangency(run, g, tan_args);
            else if (sub == strips) cmd_strips(run, g, strip_args);
            else if (sub == jacobian) cmd_jacobian(run, g, jac_args);
            else if (sub == multipulse) cmd_multipulse(run, g, mp_args);
            else if (sub == simulate) cmd_simulate(run, g, renormalize);
            else if (sub == sojourn) cmd_sojourn(run, g, soj_args);
        } catch (const VerifyFailure& e) {
            run.diagnostics()["verify_failure"] = e.what();
            run.finish();
            err << "verify failed: " << e.what() << '\n';
            return 1;
        }
        run.finish();
        return 0;
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace bykov
