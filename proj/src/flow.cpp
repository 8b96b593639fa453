#include "bykov/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bykov/common.hpp"

namespace bykov {

std::string_view to_string(Model m) {
    switch (m) {
        case Model::Dim3: return "dim3";
        case Model::Example4d: return "example4d";
        case Model::StandardLift4d: return "standard_lift4d";
    }
    return "unknown";
}

Model model_from_string(std::string_view s) {
    if (s == "dim3") return Model::Dim3;
    if (s == "example4d") return Model::Example4d;
    if (s == "standard_lift4d") return Model::StandardLift4d;
    throw ValidationError("model", "expected dim3, example4d or standard_lift4d");
}

void ModelConfig::validate() const {
    if (!std::isfinite(alpha1) || !(alpha1 > 0.0)) throw ValidationError("alpha1", "must be positive");
    if (!std::isfinite(alpha2) || !(alpha2 < 0.0)) throw ValidationError("alpha2", "must be negative");
    if (!(alpha1 + alpha2 > 0.0)) throw ValidationError("alpha2", "alpha1 + alpha2 must be positive");
    if (!std::isfinite(lambda)) throw ValidationError("lambda", "must be finite");
}

State rhs(const State& x, const ModelConfig& cfg) {
    const double a1 = cfg.alpha1;
    const double a2 = cfg.alpha2;
    if (cfg.model == Model::Dim3) {
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        const double z = x[2];
        return State{
            x[0] * (1.0 - r2) - a1 * x[0] * z + a2 * x[0] * z * z,
            x[1] * (1.0 - r2) + a1 * x[1] * z + a2 * x[1] * z * z,
            z * (1.0 - r2) + a1 * (x[0] * x[0] - x[1] * x[1]) - a2 * z * (x[0] * x[0] + x[1] * x[1]),
            0.0,
        };
    }
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    const double rate = cfg.model == Model::Example4d ? x[3] : 1.0;
    const double lam = cfg.lambda;
    return State{
        x[0] * (1.0 - r2) - rate * x[1] - a1 * x[0] * x[3] + a2 * x[0] * x[3] * x[3],
        x[1] * (1.0 - r2) + rate * x[0] - a1 * x[1] * x[3] + a2 * x[1] * x[3] * x[3],
        x[2] * (1.0 - r2) + a1 * x[2] * x[3] + a2 * x[2] * x[3] * x[3] + lam * x[0] * x[1] * x[3],
        x[3] * (1.0 - r2) - a1 * (x[2] * x[2] - x[0] * x[0] - x[1] * x[1]) -
            a2 * x[3] * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - lam * x[0] * x[1] * x[2],
    };
}

EquilibriaSpectrum equilibria_spectrum(const ModelConfig& cfg) {
    cfg.validate();
    const double a1 = cfg.alpha1;
    const double a2 = cfg.alpha2;
    EquilibriaSpectrum sp;
    // At (0, 0, 0, e): a2 - e a1 +- i and a2 + e a1.
    sp.v = NodeSpectrum{a2 - a1, 1.0, a2 + a1, -2.0};
    sp.w = NodeSpectrum{a2 + a1, 1.0, a2 - a1, -2.0};
    sp.saddle.alpha_v = 1.0;
    sp.saddle.C_v = a1 - a2;
    sp.saddle.E_v = a1 + a2;
    sp.saddle.alpha_w = 1.0;
    sp.saddle.C_w = a1 - a2;
    sp.saddle.E_w = a1 + a2;
    const double q = (a2 - a1) / (a2 + a1);
    sp.delta = q * q;
    return sp;
}

namespace {

double norm(const State& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]); }

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        for (int i = 0; i < 4; ++i) out[i] += h * c * (*k)[i];
    }
    return out;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output (Hairer, Norsett and Wanner).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct DenseStep {
    State r1, r2, r3, r4, r5;
    State at(double theta) const {
        State y{};
        const double u = 1.0 - theta;
        for (int i = 0; i < 4; ++i) y[i] = r1[i] + theta * (r2[i] + u * (r3[i] + theta * (r4[i] + u * r5[i])));
        return y;
    }
};

}  // namespace

TrajectorySeries integrate(const State& x0, double T, const ModelConfig& cfg, const IntegratorOptions& opts) {
    cfg.validate();
    for (double v : x0)
        if (!std::isfinite(v)) throw ValidationError("x0", "initial state must be finite");
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T", "horizon must be positive");
    if (!(opts.rtol > 0.0)) throw ValidationError("rtol", "must be positive");
    if (!(opts.atol >= 0.0)) throw ValidationError("atol", "must be non-negative");

    TrajectorySeries out;
    out.dim = cfg.model == Model::Dim3 ? 3 : 4;
    out.renormalized = opts.renormalize && out.dim == 4;
    State y = x0;
    if (out.dim == 3) y[3] = 0.0;
    double t = 0.0;
    out.times.push_back(t);
    out.states.push_back(y);

    auto f = [&cfg](const State& s) { return rhs(s, cfg); };
    State k1 = f(y);
    if (norm(k1) == 0.0) {
        // An equilibrium: the exact solution is constant.
        out.times.push_back(T);
        out.states.push_back(y);
        return out;
    }

    double h = std::min(1e-2, T);
    while (t < T) {
        if (out.accepted + out.rejected >= opts.max_steps) {
            out.failed = true;
            out.failure = "step budget exhausted at t = " + std::to_string(t);
            break;
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            out.failed = true;
            out.failure = "step size underflow at t = " + std::to_string(t);
            break;
        }
        const bool last = t + h >= T;
        if (last) h = T - t;

        const State k2 = f(axpy(y, h, {{a21, &k1}}));
        const State k3 = f(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const State k4 = f(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = f(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 = f(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State y1 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = f(y1);

        double err2 = 0.0;
        double raw2 = 0.0;
        for (int i = 0; i < out.dim; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
            const double q = sc > 0.0 ? e / sc : (e == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            err2 += q * q;
            raw2 += e * e;
        }
        const double err = std::sqrt(err2 / out.dim);
        for (double v : y1) {
            if (!std::isfinite(v)) {
                out.failed = true;
                out.failure = "non-finite state at t = " + std::to_string(t);
                return out;
            }
        }

        if (err <= 1.0) {
            ++out.accepted;
            out.max_error_estimate = std::max(out.max_error_estimate, err);
            out.error_sum += std::sqrt(raw2);

            DenseStep dense;
            dense.r1 = y;
            for (int i = 0; i < 4; ++i) {
                const double diff = y1[i] - y[i];
                const double bspl = h * k1[i] - diff;
                dense.r2[i] = diff;
                dense.r3[i] = bspl;
                dense.r4[i] = diff - h * k7[i] - bspl;
                dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            // Fill in until consecutive samples are closer than max_sample_gap.
            State step = y1;
            for (int i = 0; i < 4; ++i) step[i] -= y[i];
            int pieces = static_cast<int>(std::ceil(norm(step) / (0.5 * opts.max_sample_gap)));
            for (;;) {
                bool fine = true;
                State prev = y;
                for (int j = 1; j <= pieces && fine; ++j) {
                    const State s = j == pieces ? y1 : dense.at(static_cast<double>(j) / pieces);
                    State d = s;
                    for (int i = 0; i < 4; ++i) d[i] -= prev[i];
                    fine = norm(d) < opts.max_sample_gap;
                    prev = s;
                }
                if (fine || pieces > 4096) break;
                pieces *= 2;
            }
            const double t_new = last ? T : t + h;
            for (int j = 1; j < pieces; ++j) {
                const double theta = static_cast<double>(j) / pieces;
                out.times.push_back(t + theta * h);
                out.states.push_back(dense.at(theta));
            }

            t = t_new;
            y = y1;
            k1 = k7;
            if (out.renormalized) {
                const double r = norm(y);
                for (double& v : y) v /= r;
                k1 = f(y);
            }
            out.times.push_back(t);
            out.states.push_back(y);
        } else {
            ++out.rejected;
        }
        const double fac = err == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0);
        h *= err <= 1.0 ? fac : std::min(fac, 1.0);
    }
    return out;
}

SphereResidual sphere_residual(const TrajectorySeries& series) {
    if (series.states.empty()) throw ValidationError("series", "empty");
    auto r2_of = [](const State& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]; };
    const double r2_0 = r2_of(series.states.front());
    if (r2_0 == 0.0) throw ValidationError("x0", "the origin is an excluded equilibrium");

    SphereResidual out;
    out.started_on_sphere = std::abs(r2_0 - 1.0) < 1e-14;
    const double c = 1.0 / r2_0 - 1.0;
    bool in_band = false;
    for (std::size_t i = 0; i < series.states.size(); ++i) {
        const double r2 = r2_of(series.states[i]);
        const double exact = 1.0 / (1.0 + c * std::exp(-2.0 * series.times[i]));
        out.residual = std::max(out.residual, std::abs(r2 - exact));
        out.max_abs_r2_minus_1 = std::max(out.max_abs_r2_minus_1, std::abs(r2 - 1.0));
        in_band = in_band || std::abs(r2 - 1.0) <= 1e-3;
        if (in_band) out.band_tail = std::max(out.band_tail, std::abs(r2 - 1.0));
    }
    return out;
}

std::string_view to_string(Chirality c) {
    switch (c) {
        case Chirality::Same: return "same";
        case Chirality::Different: return "different";
        case Chirality::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

namespace {

double distance(const State& a, const State& b) {
    State d = a;
    for (int i = 0; i < 4; ++i) d[i] -= b[i];
    return norm(d);
}

}  // namespace

ChiralityReport chirality_check(const TrajectorySeries& series, const ModelConfig& cfg, double radius) {
    if (cfg.model == Model::Dim3) throw ValidationError("model", "chirality needs a four-dimensional model");
    ChiralityReport rep;
    const double inf = std::numeric_limits<double>::infinity();
    rep.theta_dot_v_min = rep.theta_dot_w_min = inf;
    rep.theta_dot_v_max = rep.theta_dot_w_max = -inf;

    for (const State& x : series.states) {
        const State dx = rhs(x, cfg);
        const double rho2 = x[0] * x[0] + x[1] * x[1];
        const double rate = cfg.model == Model::Example4d ? x[3] : 1.0;
        const double cross = x[0] * dx[1] - x[1] * dx[0];
        rep.identity_residual = std::max(rep.identity_residual, std::abs(cross - rate * rho2));
        if (rho2 == 0.0) continue;
        const double theta_dot = cross / rho2;
        if (distance(x, kNodeV) < radius) {
            ++rep.samples_v;
            rep.theta_dot_v_min = std::min(rep.theta_dot_v_min, theta_dot);
            rep.theta_dot_v_max = std::max(rep.theta_dot_v_max, theta_dot);
        } else if (distance(x, kNodeW) < radius) {
            ++rep.samples_w;
            rep.theta_dot_w_min = std::min(rep.theta_dot_w_min, theta_dot);
            rep.theta_dot_w_max = std::max(rep.theta_dot_w_max, theta_dot);
        }
    }

    if (rep.samples_v == 0 || rep.samples_w == 0) {
        rep.verdict = Chirality::Inconclusive;
        rep.message = "no samples within " + std::to_string(radius) + " of " + (rep.samples_v == 0 ? "v" : "w");
        return rep;
    }
    const bool v_pos = rep.theta_dot_v_min > 0.0;
    const bool v_neg = rep.theta_dot_v_max < 0.0;
    const bool w_pos = rep.theta_dot_w_min > 0.0;
    const bool w_neg = rep.theta_dot_w_max < 0.0;
    if ((v_pos && w_neg) || (v_neg && w_pos)) {
        rep.verdict = Chirality::Different;
        rep.message = "theta' keeps opposite signs near v and near w";
    } else {
        rep.verdict = Chirality::Same;
        rep.message = "theta' does not keep opposite signs near the two nodes";
    }
    return rep;
}

SojournReport sojourn_analysis(const TrajectorySeries& series, double radius, std::size_t discard) {
    if (!(radius > 0.0)) throw ValidationError("radius", "must be positive");
    SojournReport rep;
    rep.discarded = discard;

    // Signed margin: positive inside the neighbourhood of the node.
    auto margin = [radius](const State& x, const State& node) { return radius - distance(x, node); };
    const std::size_t n = series.states.size();
    for (const auto& [node, label] : {std::pair{kNodeV, 'v'}, std::pair{kNodeW, 'w'}}) {
        bool inside = false;
        Dwell cur;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = margin(series.states[i], node);
            if (!inside && m > 0.0) {
                inside = true;
                cur = Dwell{label, series.times[i], 0.0, false};
                if (i > 0) {
                    const double m0 = margin(series.states[i - 1], node);
                    cur.t_enter = series.times[i - 1] + (series.times[i] - series.times[i - 1]) * (-m0) / (m - m0);
                }
            } else if (inside && m <= 0.0) {
                const double m0 = margin(series.states[i - 1], node);
                cur.t_exit = series.times[i - 1] + (series.times[i] - series.times[i - 1]) * m0 / (m0 - m);
                cur.complete = true;
                rep.dwells.push_back(cur);
                inside = false;
            }
        }
        if (inside) {
            cur.t_exit = series.times.back();
            rep.dwells.push_back(cur);
        }
    }
    std::sort(rep.dwells.begin(), rep.dwells.end(),
              [](const Dwell& a, const Dwell& b) { return a.t_enter < b.t_enter; });

    const auto complete = std::count_if(rep.dwells.begin(), rep.dwells.end(), [](const Dwell& d) { return d.complete; });
    if (complete < 2) throw InsufficientDataError("fewer than two complete dwells near the nodes");

    for (char label : {'v', 'w'}) {
        const Dwell* prev = nullptr;
        for (std::size_t i = discard; i < rep.dwells.size(); ++i) {
            const Dwell& d = rep.dwells[i];
            if (d.node != label || !d.complete) continue;
            if (prev) rep.ratios.push_back(d.duration() / prev->duration());
            prev = &d;
        }
    }
    if (rep.ratios.empty()) throw InsufficientDataError("no consecutive same-node dwells after the transient");
    std::vector<double> sorted = rep.ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    rep.median_ratio = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    return rep;
}

std::vector<SubspaceResidual> invariant_subspace_residuals(const TrajectorySeries& series) {
    std::vector<SubspaceResidual> out;
    if (series.states.empty()) return out;
    for (int c = 0; c < series.dim; ++c) {
        if (series.states.front()[c] != 0.0) continue;
        SubspaceResidual r{c, 0.0};
        for (const State& x : series.states) r.max_abs = std::max(r.max_abs, std::abs(x[c]));
        out.push_back(r);
    }
    return out;
}

State kappa1(const State& x) { return State{-x[0], -x[1], x[2], x[3]}; }

}  // namespace bykov
