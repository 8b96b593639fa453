// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "bykov/common.hpp"
#include "bykov/flow.hpp"
#include "bykov/horseshoe.hpp"
#include "bykov/params.hpp"
#include "bykov/returncurve.hpp"
#include "fixtures.hpp"

using namespace bykov;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> ut(-kPi, kPi), ue(-10.0, 0.0);
    double worst = 0.0;
    int compared = 0, redrawn = 0;
    while (compared < 10000) {
        const SaddleParams p = fixtures::random_params(rng);
        const DerivedConstants k = derive_constants(p);
        const double t = ut(rng);
        const double s = p.eps * std::pow(10.0, ue(rng));
        const ReturnCurveSample e = eta(t, s, k);
        // Heights below the normal double range carry no relative accuracy.
        if (e.y_w < std::numeric_limits<double>::min()) {
            ++redrawn;
            continue;
        }
        ++compared;
        const ReturnCurveSample c = eta_by_composition(t, s, k);
        worst = std::max({worst, std::abs(e.x_w - c.x_w) / std::max(1.0, std::abs(c.x_w)),
                          std::abs(e.y_w - c.y_w) / c.y_w});
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-9 && secs < 10.0,
            fmt("max error %.3g over 1e4 samples (%g redrawn with subnormal height), %.2f s", worst, redrawn, secs)};
}

Outcome rotation_lemma() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1002);
    std::uniform_int_distribution<int> un(0, 20);
    std::uniform_real_distribution<double> u01(1e-6, 1.0), ut(-kPi, kPi);
    double worst = 0.0;
    bool zero_ok = true;
    for (int i = 0; i < 100; ++i) {
        const SaddleParams p = fixtures::random_params(rng);
        const double s0 = p.eps * u01(rng), t = ut(rng);
        worst = std::max(worst, rotation_lemma_residual(s0, un(rng), t, p));
        zero_ok = zero_ok && rotation_lemma_residual(s0, 0, t, p) == 0.0;
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-9 && zero_ok && secs < 1.0,
            fmt("max residual %.3g, %.3f s", worst, secs) + ", n=0 exact " + (zero_ok ? "yes" : "no")};
}

// Reversals seen on a dense grid of ln s covering one full period of the angle.
bool grid_shows_reversal(const SaddleParams& p) {
    const DerivedConstants k = derive_constants(p);
    const int n = 20000;
    const double span = 1.05 * kPi / k.g_v;
    const double top = std::log(p.eps);
    int sign = 0;
    double prev = eta_log(0.0, top, k).x_w;
    for (int i = 1; i <= n; ++i) {
        const double x = eta_log(0.0, top - span * i / n, k).x_w;
        const double dx = x - prev;
        prev = x;
        const int sg = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
        if (sg == 0) continue;
        if (sign != 0 && sg != sign) return true;
        sign = sg;
    }
    return false;
}

Outcome region_consistency() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1003);
    int contradictions = 0, with_reversals = 0, boundary = 0;
    for (int i = 0; i < 1000; ++i) {
        SaddleParams p = fixtures::random_params(rng);
        if (i % 50 == 0) p.a = 1.0;
        const RegionTag tag = classify_region(p).tag;
        if (tag == RegionTag::BoundaryB) {
            ++boundary;
            continue;
        }
        const bool predicted = tag == RegionTag::InteriorB_GammaRational || tag == RegionTag::DenseReversals_D;
        const bool seen = grid_shows_reversal(p);
        with_reversals += seen;
        contradictions += predicted != seen;
    }
    const double secs = seconds_since(t0);
    return {contradictions == 0 && secs < 60.0,
            fmt("%g contradictions, %g parameter sets with reversals, %g on the boundary, %.1f s", contradictions,
                with_reversals, boundary, secs)};
}

Outcome dense_reversals() {
    const auto t0 = std::chrono::steady_clock::now();
    const SaddleParams p = fixtures::dense_d();
    const ReversalSequence half = reversal_sequence(0.0, 5000, p);
    const ReversalSequence full = reversal_sequence(0.0, 10000, p);
    const double g_half = max_circle_gap(half.x_values);
    const double g_full = max_circle_gap(full.x_values);
    const double secs = seconds_since(t0);
    return {full.size() == 10000 && g_full < 0.05 * kTwoPi && g_full < g_half && secs < 5.0,
            fmt("max gap %.4g at n=1e4 (limit %.4g), %.4g at n=5e3, %.2f s", g_full, 0.05 * kTwoPi, g_half, secs)};
}

Outcome tangency() {
    const SaddleParams p = fixtures::dense_d();
    const double x0 = 1.0;
    double amp[3];
    const std::size_t ns[3] = {100, 1000, 10000};
    for (int i = 0; i < 3; ++i) amp[i] = std::abs(find_tangency(x0, 0.0, ns[i], p).bump.amplitude);
    return {amp[2] < 0.01 && amp[1] <= amp[0] && amp[2] <= amp[1],
            fmt("amplitudes %.3g, %.3g, %.3g at n_max = 1e2, 1e3, 1e4", amp[0], amp[1], amp[2])};
}

Outcome strips() {
    std::string detail;
    bool pass = true;
    struct Case {
        const char* name;
        SaddleParams p;
        double tau;
    };
    const Case cases[] = {{"case I", fixtures::case_i(), 0.4}, {"case III", fixtures::dense_d(), 0.05}};
    for (const auto& [name, p, tau] : cases) {
        const StripFamily fam = build_strips(tau, 8, p);
        const StripCheck chk = check_strip_invariants(fam, p);
        pass = pass && fam.strips.size() >= 5 && chk.ok;
        detail += std::string(name) + ": " + std::to_string(fam.strips.size()) + " strips, invariants " +
                  (chk.ok ? "ok" : "FAILED (" + chk.failures.front() + ")") +
                  fmt(", image y in [%.3g, %.3g] for tau %.3g; ", chk.image_y_min, chk.image_y_max, fam.tau);
    }
    return {pass, detail};
}

Outcome hyperbolicity() {
    bool pass = true;
    std::string detail;
    std::mt19937_64 rng(1007);
    const std::pair<SaddleParams, double> cases[] = {{fixtures::case_i(), 0.4}, {fixtures::dense_d(), 0.05}};
    for (const auto& [p, tau] : cases) {
        const StripFamily fam = build_strips(tau, 8, p);
        const StripHyperbolicity h = strip_hyperbolicity(fam, p);
        bool monotone = true;
        double prev = INFINITY, first = 0.0;
        for (int kk = 4; kk <= 20; ++kk) {
            const double det = std::abs(jacobian_report(0.3, std::ldexp(1.0, -kk), p).det_fd);
            if (kk == 4) first = det;
            monotone = monotone && det < prev;
            prev = det;
        }
        std::size_t agree = 0, flagged = 0, silent = 0;
        std::uniform_real_distribution<double> ux(-kPi, kPi), ue(std::log(1e-4), std::log(p.eps));
        for (int i = 0; i < 1000; ++i) {
            const JacobianReport r = jacobian_report(ux(rng), std::exp(ue(rng)), p);
            const bool ok = std::abs(r.det_cf - r.det_fd) <= 1e-6 * std::abs(r.det_fd);
            if (ok) ++agree;
            else if (r.det_discrepancy) ++flagged;
            else ++silent;
        }
        pass = pass && h.fraction() >= 0.99 && monotone && prev < first && silent == 0;
        detail += fmt("saddle %.4f of %g samples (y* %.3g), ", h.fraction(), h.samples, h.y_star) +
                  std::string("det monotone ") + (monotone ? "yes" : "no") + fmt(" from %.3g to %.3g, ", first, prev) +
                  fmt("det agree %g flagged %g silent %g; ", agree, flagged, silent);
    }
    return {pass, detail};
}

Outcome multipulse() {
    const SaddleParams p = fixtures::case_i();
    bool pass = true;
    std::string detail;
    for (int n : {2, 3}) {
        const std::vector<PulsePoint> pts = find_multipulse(n, p, 0.0);
        double worst = 0.0;
        for (const PulsePoint& pt : pts) worst = std::max(worst, replay_pulse(pt, p, 0.0));
        pass = pass && !pts.empty() && worst < 1e-8;
        detail += fmt("n=%g: %g points, max replay %.3g; ", n, pts.size(), worst);
    }
    return {pass, detail};
}

Outcome explicit_flow() {
    const auto t0 = std::chrono::steady_clock::now();
    const ModelConfig cfg{1.0, -0.1, 0.0, Model::Example4d};
    const TrajectorySeries s = integrate(State{-0.5, -0.139, -0.8807, 0.3013}, 500.0, cfg);
    const SphereResidual sr = sphere_residual(s);
    const ChiralityReport ch = chirality_check(s, cfg);
    const SojournReport so = sojourn_analysis(s, 0.3, 2);
    const double delta = equilibria_spectrum(cfg).delta;
    const double rel = std::abs(so.median_ratio / delta - 1.0);
    const double secs = seconds_since(t0);
    return {!s.failed && sr.residual < 1e-7 && ch.verdict == Chirality::Different && rel < 0.1 && secs < 30.0,
            fmt("sphere residual %.3g, median ratio %.4f vs delta %.4f, %.1f s", sr.residual, so.median_ratio, delta,
                secs) +
                ", chirality " + std::string(to_string(ch.verdict))};
}

Outcome symmetry() {
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const ModelConfig cfg{1.0, -0.1, 0.0, Model::Example4d};
    const ModelConfig pert{1.0, -0.1, 0.05, Model::Example4d};
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const State x{u(rng), u(rng), u(rng), u(rng)};
        for (const ModelConfig& c : {cfg, pert}) {
            const State a = rhs(kappa1(x), c), b = kappa1(rhs(x, c));
            for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
        }
    }
    const TrajectorySeries s = integrate(State{-0.5, -0.139, 0.0, 0.3013}, 100.0, cfg);
    double x3 = 0.0;
    for (const SubspaceResidual& r : invariant_subspace_residuals(s))
        if (r.component == 2) x3 = r.max_abs;
    return {worst < 1e-13 && x3 < 1e-12, fmt("equivariance residual %.3g, max |x3| %.3g", worst, x3)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"closed form matches composition of local maps", oracle_equivalence},
        {"rotation lemma", rotation_lemma},
        {"region classification against dense-grid reversals", region_consistency},
        {"dense reversals on the circle", dense_reversals},
        {"tangency bump amplitude", tangency},
        {"horizontal strips", strips},
        {"hyperbolicity of the return map", hyperbolicity},
        {"multi-pulse connections", multipulse},
        {"explicit flow on the sphere", explicit_flow},
        {"symmetry and invariant subspace", symmetry},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
