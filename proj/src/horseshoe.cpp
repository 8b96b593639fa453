#include "bykov/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bykov/common.hpp"

namespace bykov {

namespace {

constexpr double kLogFloor = -690.0;  // s = e^-690 ~ 1e-300

// g without the domain checks, keeping the second coordinate unreduced.
struct RawImage {
    double x;
    double y;
};

RawImage raw_return(double t, double s, const DerivedConstants& k, const ReturnMapOptions& opts) {
    const ReturnCurveSample e = eta(t, s, k);
    double x = e.x_w;
    if (opts.bump) x += (*opts.bump)(e.x_w, e.y_w);
    return RawImage{e.y_w, opts.x_stable - x};
}

void check_on_In_v(const WallPoint& p, const DerivedConstants& k) {
    if (p.section != WallSection::In_v) throw ValidationError("section", "return map acts on In(v)");
    if (p.y == 0.0) throw InvariantManifoldError("return_map: point lies on the stable manifold of v");
    if (!(p.y > 0.0)) throw ValidationError("y", "height on In(v) must be positive");
    if (p.y > k.eps) throw ValidationError("y", "height on In(v) must not exceed eps");
}

// Root of a monotone function f on [lo, hi] with f(lo), f(hi) of opposite sign.
template <class F>
double bisect(F f, double lo, double hi) {
    double f_lo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

WallPoint return_map(const WallPoint& p, const DerivedConstants& k, const ReturnMapOptions& opts) {
    check_on_In_v(p, k);
    if (opts.bump) opts.bump->validate();
    const RawImage r = raw_return(p.x, p.y, k, opts);
    return WallPoint{WallSection::In_v, r.x, wrap_pi(r.y)};
}

WallPoint return_map_by_composition(const WallPoint& p, const DerivedConstants& k, const ReturnMapOptions& opts) {
    check_on_In_v(p, k);
    const ReturnCurveSample e = eta_by_composition(p.x, p.y, k);
    return psi_wv(WallPoint{WallSection::Out_w, e.x_w, e.y_w}, opts.bump, opts.x_stable);
}

std::string_view to_string(StripCase c) {
    switch (c) {
        case StripCase::I: return "I";
        case StripCase::II: return "II";
        case StripCase::III: return "III";
        case StripCase::IV: return "IV";
    }
    return "unknown";
}

StripCase strip_case_for(RegionTag tag) {
    switch (tag) {
        case RegionTag::NoReversal_aEq1:
        case RegionTag::OutsideB: return StripCase::I;
        case RegionTag::InteriorB_GammaRational: return StripCase::II;
        case RegionTag::DenseReversals_D: return StripCase::III;
        case RegionTag::BoundaryB: return StripCase::IV;
    }
    return StripCase::I;
}

PeriodicTangency detect_periodic_tangency(const SaddleParams& p, double x0, std::size_t n_probe,
                                          const ClassifyOptions& opts) {
    PeriodicTangency out;
    out.distance = std::numeric_limits<double>::infinity();
    if (classify_region(p, opts).tag != RegionTag::InteriorB_GammaRational) return out;
    const ReversalSequence seq = reversal_sequence(0.0, n_probe, p, opts);
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const double d = circle_distance(seq.x_values[n], x0);
        if (d < out.distance) {
            out.distance = d;
            out.witness = n;
            out.x_w = seq.x_values[n];
        }
        if (d < 1e-9) {
            out.found = true;
            return out;
        }
    }
    return out;
}

namespace {

struct MonotoneInterval {
    double lo;
    double hi;
    int direction;
};

// x_w along beta_t equals gamma t + G(phi), phi the Out(v) angle.
double G_of_phi(double phi, const DerivedConstants& k) { return eta_log(0.0, (k.c2 - phi) / k.g_v, k).x_w; }

double log_s_of(double t, double phi, const DerivedConstants& k) { return (k.c2 + t - phi) / k.g_v; }

}  // namespace

StripFamily build_strips(double tau, int n_limit, const SaddleParams& p, const StripOptions& opts) {
    const DerivedConstants k = derive_constants(p);
    if (!(tau > 0.0) || tau > std::min(kPi, p.eps)) throw ValidationError("tau", "must lie in (0, min(pi, eps)]");
    if (n_limit < 1) throw ValidationError("n_limit", "must be >= 1");
    if (opts.t_samples < 2) throw ValidationError("t_samples", "must be >= 2");
    if (std::abs(k.gamma - 1.0) < 1e-12) {
        throw UnsupportedResonanceError("gamma = 1: x_w has no drift and no strip family exists");
    }

    const Region region = classify_region(p, opts.classify);
    if (region.tag == RegionTag::InteriorB_GammaRational) {
        const PeriodicTangency pt = detect_periodic_tangency(p, opts.x_stable, opts.tangency_probe, opts.classify);
        if (pt.found) {
            std::ostringstream msg;
            msg << "periodic tangency: reversal point " << pt.witness << " has x_w = " << pt.x_w
                << " on the trace of W^s(v)";
            throw PeriodicTangencyError(msg.str(), pt.witness, pt.x_w);
        }
    }

    StripFamily fam;
    fam.tau_requested = tau;
    fam.region = region.tag;
    fam.strip_case = strip_case_for(region.tag);
    const int dir = k.gamma > 1.0 ? 1 : -1;
    const double K = reversal_level(p);
    std::ostringstream note;

    auto shrink = [&](double limit, const char* why) {
        if (tau >= limit) {
            tau = limit;
            note << "tau shrunk to " << tau << " (" << why << "); ";
        }
    };
    // Bands of consecutive crossings must not overlap.
    shrink(0.9 * kTwoPi / (1.0 + k.gamma), "(1 + gamma) tau < 2 pi");

    // Monotone pieces of x_w inside one period [0, pi) of the angle; they
    // repeat with period pi.
    std::vector<MonotoneInterval> pattern;
    double inflection = 0.0;
    if (fam.strip_case == StripCase::II || fam.strip_case == StripCase::III) {
        const AExtrema ext = A_extrema(p);
        const ReversalAngles roots = reversal_angles(p, ext);
        const std::size_t m = roots.phi.size();
        for (std::size_t i = 0; i < m; ++i) {
            const double lo = roots.phi[i];
            const double hi = (i + 1 < m) ? roots.phi[i + 1] : roots.phi[0] + kPi;
            const int d = sign_of(A_of_phi(0.5 * (lo + hi), p) - K);
            if (d == dir) pattern.push_back({lo, hi, d});
        }
        if (pattern.empty()) {
            fam.tau = tau;
            fam.note = note.str() + "no monotone interval in the drift direction";
            return fam;
        }
        double d_min = kPi;
        double range_min = std::numeric_limits<double>::infinity();
        for (const auto& iv : pattern) {
            d_min = std::min(d_min, iv.hi - iv.lo);
            range_min = std::min(range_min, std::abs(G_of_phi(iv.hi, k) - G_of_phi(iv.lo, k)));
        }
        shrink(0.49 * d_min, "tau < d/2");
        shrink(0.9 * range_min / (1.0 + k.gamma), "crossing band inside the x_w-range of an interval");
    } else if (fam.strip_case == StripCase::IV) {
        shrink(0.45 * kPi / 10.0, "exclusion zones must leave room");
        const AExtrema ext = A_extrema(p);
        inflection = std::abs(K - ext.A_min) < std::abs(K - ext.A_max) ? ext.phi_min : ext.phi_max;
    }
    fam.tau = tau;

    // s <= tau for every t in [0, tau], and s above the underflow floor.
    const double phi_start = tau + k.c2 - k.g_v * std::log(tau);
    const double phi_end = k.c2 - k.g_v * kLogFloor;

    auto next_interval = [&, period = std::floor(phi_start / kPi) - 1.0, idx = std::size_t{0},
                          done = false]() mutable -> std::optional<MonotoneInterval> {
        if (done) return std::nullopt;
        if (fam.strip_case == StripCase::I) {
            done = true;
            return MonotoneInterval{phi_start, phi_end, dir};
        }
        while (true) {
            MonotoneInterval iv{};
            if (fam.strip_case == StripCase::IV) {
                const double zone = 10.0 * tau;
                iv = {inflection + period * kPi + zone, inflection + (period + 1.0) * kPi - zone, dir};
                period += 1.0;
            } else {
                const MonotoneInterval& base = pattern[idx];
                iv = {base.lo + period * kPi, base.hi + period * kPi, base.direction};
                if (++idx == pattern.size()) {
                    idx = 0;
                    period += 1.0;
                }
            }
            if (iv.lo >= phi_end) {
                done = true;
                return std::nullopt;
            }
            iv.lo = std::max(iv.lo, phi_start);
            iv.hi = std::min(iv.hi, phi_end);
            if (iv.hi > iv.lo) return iv;
        }
    };

    const int nt = opts.t_samples;
    const double band = (1.0 + k.gamma) * tau;
    int n = 0;
    while (n < n_limit) {
        const auto iv = next_interval();
        if (!iv) {
            note << "stopped at the underflow floor s ~ 1e-300 after " << n << " strips; ";
            break;
        }
        const double g_lo = G_of_phi(iv->lo, k);
        const double g_hi = G_of_phi(iv->hi, k);
        const double g_min = std::min(g_lo, g_hi);
        const double g_max = std::max(g_lo, g_hi);
        // Levels x_stable + 2 pi m, visited in order of increasing phi.
        const long m_first = static_cast<long>(std::floor((g_lo - opts.x_stable) / kTwoPi));
        const long m_last = static_cast<long>(std::floor((g_hi - opts.x_stable) / kTwoPi));
        const long step = m_last >= m_first ? 1 : -1;
        for (long m = m_first;; m += step) {
            if (n >= n_limit) break;
            const double top = opts.x_stable + kTwoPi * static_cast<double>(m);
            if (top - band > g_min && top < g_max) {
                Strip strip;
                strip.level = m;
                strip.phi_lo = iv->lo;
                strip.phi_hi = iv->hi;
                strip.direction = iv->direction;
                bool fits = true;
                for (int j = 0; j < nt && fits; ++j) {
                    const double t = tau * static_cast<double>(j) / static_cast<double>(nt - 1);
                    auto level = [&](double target) {
                        return bisect([&](double phi) { return G_of_phi(phi, k) + k.gamma * t - target; }, iv->lo,
                                      iv->hi);
                    };
                    const double ls0 = log_s_of(t, level(top), k);
                    const double ls1 = log_s_of(t, level(top - tau), k);
                    const double s_a = std::exp(std::min(ls0, ls1));
                    const double s_b = std::exp(std::max(ls0, ls1));
                    // The image under g must stay inside the rectangle.
                    const double y_img = std::max(eta(t, s_a, k).y_w, eta(t, s_b, k).y_w);
                    if (!(s_a > 0.0) || !(s_a < s_b) || s_b > tau || y_img > tau) fits = false;
                    strip.t.push_back(t);
                    strip.a.push_back(s_a);
                    strip.b.push_back(s_b);
                }
                if (fits) {
                    strip.n = n++;
                    fam.strips.push_back(std::move(strip));
                }
            }
            if (m == m_last) break;
        }
    }
    fam.note = note.str();
    return fam;
}

StripCheck check_strip_invariants(const StripFamily& fam, const SaddleParams& p, double x_stable, double tol) {
    const DerivedConstants k = derive_constants(p);
    const double K = reversal_level(p);
    const int drift = k.gamma > 1.0 ? 1 : -1;
    const double tau = fam.tau;
    ReturnMapOptions ropts;
    ropts.x_stable = x_stable;

    StripCheck chk;
    chk.image_y_min = chk.image_x_min = std::numeric_limits<double>::infinity();
    chk.image_y_max = chk.image_x_max = -std::numeric_limits<double>::infinity();
    auto fail = [&chk](const std::string& what) {
        chk.ok = false;
        if (chk.failures.size() < 50) chk.failures.push_back(what);
    };

    for (std::size_t i = 0; i < fam.strips.size(); ++i) {
        const Strip& st = fam.strips[i];
        const std::string tag = "strip " + std::to_string(st.n) + ": ";
        if (st.direction != drift) fail(tag + "monotonicity against the drift direction");
        const double target_a = x_stable - (st.direction > 0 ? tau : 0.0);
        const double target_b = x_stable - (st.direction > 0 ? 0.0 : tau);
        for (std::size_t j = 0; j < st.t.size(); ++j) {
            const double t = st.t[j];
            const double a = st.a[j];
            const double b = st.b[j];
            if (!(a > 0.0 && a < b)) fail(tag + "ordering 0 < a < b violated");
            if (b > tau * (1.0 + 1e-12)) fail(tag + "b exceeds tau");
            const double ea = circle_distance(eta(t, a, k).x_w, target_a);
            const double eb = circle_distance(eta(t, b, k).x_w, target_b);
            chk.max_level_error = std::max({chk.max_level_error, ea, eb});
            if (ea > tol || eb > tol) fail(tag + "boundary level off by " + std::to_string(std::max(ea, eb)));
            for (int q = 0; q <= 4; ++q) {
                const double ls = std::log(a) + (std::log(b) - std::log(a)) * q / 4.0;
                const ReturnCurveSample e = eta_log(t, ls, k);
                if (sign_of(scaled_dxw(e.phi, k)) != st.direction) fail(tag + "dx_w/ds changes sign");
                if (sign_of(A_of_phi(e.phi, p) - K) != st.direction) fail(tag + "A - K changes sign");
            }
            if (i + 1 < fam.strips.size()) {
                const Strip& nx = fam.strips[i + 1];
                if (j < nx.t.size() && !(nx.b[j] < a)) fail(tag + "overlaps the next strip");
            }
        }

        // Images of the four boundary curves under g.
        std::vector<std::pair<double, double>> boundary;
        for (std::size_t j = 0; j < st.t.size(); ++j) {
            boundary.emplace_back(st.t[j], st.a[j]);
            boundary.emplace_back(st.t[j], st.b[j]);
        }
        for (std::size_t j : {std::size_t{0}, st.t.size() - 1}) {
            for (int q = 1; q < 8; ++q) {
                const double ls = std::log(st.a[j]) + (std::log(st.b[j]) - std::log(st.a[j])) * q / 8.0;
                boundary.emplace_back(st.t[j], std::exp(ls));
            }
        }
        double y_lo = std::numeric_limits<double>::infinity();
        double y_hi = -y_lo;
        for (const auto& [t, s] : boundary) {
            const WallPoint img = return_map(WallPoint{WallSection::In_v, t, s}, k, ropts);
            y_lo = std::min(y_lo, img.y);
            y_hi = std::max(y_hi, img.y);
            chk.image_x_min = std::min(chk.image_x_min, img.x);
            chk.image_x_max = std::max(chk.image_x_max, img.x);
            if (!(img.x > 0.0) || img.x > tau) fail(tag + "image leaves the rectangle in x");
            if (img.y < -tol || img.y > tau + tol) fail(tag + "image leaves the rectangle in y");
        }
        if (y_lo > tol || y_hi < tau - tol) fail(tag + "image does not span [0, tau] in y");
        chk.image_y_min = std::min(chk.image_y_min, y_lo);
        chk.image_y_max = std::max(chk.image_y_max, y_hi);
    }

    if (fam.strips.size() >= 2) {
        const Strip& first = fam.strips.front();
        const Strip& last = fam.strips.back();
        for (std::size_t j = 0; j < first.t.size() && j < last.t.size(); ++j) {
            if (!(last.a[j] < first.a[j])) fail("a_n does not decrease along the family");
        }
    }
    return chk;
}

std::string_view to_string(EigenClass c) {
    switch (c) {
        case EigenClass::Saddle: return "saddle";
        case EigenClass::DoubleContraction: return "double_contraction";
        case EigenClass::DoubleExpansion: return "double_expansion";
        case EigenClass::NonHyperbolic: return "non_hyperbolic";
    }
    return "unknown";
}

EigenClass classify_eigen(double trace, double det, double tol) {
    double m1 = 0.0;
    double m2 = 0.0;
    if (std::abs(trace) > 1e150) {
        m1 = std::abs(trace);
        m2 = std::abs(det / trace);
    } else {
        const double disc = trace * trace - 4.0 * det;
        if (disc >= 0.0) {
            const double l1 = 0.5 * (trace + std::copysign(std::sqrt(disc), trace));
            m1 = std::abs(l1);
            m2 = l1 != 0.0 ? std::abs(det / l1) : 0.0;
        } else {
            m1 = m2 = std::sqrt(det);
        }
    }
    if (std::abs(m1 - 1.0) < tol || std::abs(m2 - 1.0) < tol) return EigenClass::NonHyperbolic;
    const double lo = std::min(m1, m2);
    const double hi = std::max(m1, m2);
    if (lo < 1.0 && hi > 1.0) return EigenClass::Saddle;
    return hi < 1.0 ? EigenClass::DoubleContraction : EigenClass::DoubleExpansion;
}

namespace {

struct FdJacobian {
    double m[2][2];
    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    double trace() const { return m[0][0] + m[1][1]; }
};

FdJacobian fd_jacobian(double x, double y, double hx, double hy, const DerivedConstants& k,
                       const ReturnMapOptions& opts) {
    const RawImage xp = raw_return(x + hx, y, k, opts);
    const RawImage xm = raw_return(x - hx, y, k, opts);
    const RawImage yp = raw_return(x, y + hy, k, opts);
    const RawImage ym = raw_return(x, y - hy, k, opts);
    FdJacobian j{};
    j.m[0][0] = (xp.x - xm.x) / (2.0 * hx);
    j.m[1][0] = wrap_pi(xp.y - xm.y) / (2.0 * hx);
    j.m[0][1] = (yp.x - ym.x) / (2.0 * hy);
    j.m[1][1] = wrap_pi(yp.y - ym.y) / (2.0 * hy);
    return j;
}

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace

JacobianReport jacobian_report(double x, double y, const SaddleParams& p, const ReturnMapOptions& opts,
                               double rel_tol) {
    if (!(y > 0.0)) throw ValidationError("y", "Jacobian needs y > 0");
    const DerivedConstants k = derive_constants(p);
    if (opts.bump) opts.bump->validate();

    JacobianReport r;
    r.x = x;
    r.y = y;
    const ReturnCurveSample e = eta(x, y, k);
    r.phi = e.phi;

    // Central differences at h and h/2 combined by Richardson extrapolation.
    // The determinant is a small difference of large products, so the steps
    // are kept large enough for rounding not to dominate.
    const double hx = 1e-5 * std::max(1.0, std::abs(x));
    const double hy = 1e-5 * y;
    const FdJacobian j1 = fd_jacobian(x, y, hx, hy, k, opts);
    const FdJacobian j2 = fd_jacobian(x, y, 0.5 * hx, 0.5 * hy, k, opts);
    FdJacobian j{};
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 2; ++c) j.m[i][c] = (4.0 * j2.m[i][c] - j1.m[i][c]) / 3.0;
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 2; ++c) r.jac_fd[i][c] = j.m[i][c];
    r.det_fd = j.det();
    r.trace_fd = j.trace();
    r.fd_error = std::max(rel_diff(j.det(), j2.det()), rel_diff(j.trace(), j2.trace()));

    const double C = C_of_phi(e.phi, k.a);
    const double D = k.a * k.a - 1.0 / (k.a * k.a);
    const double sc = std::sin(e.phi) * std::cos(e.phi);
    const double log_y = std::log(y);
    const double c1dw = std::pow(k.c1, k.delta_w);
    const double Cpow = std::pow(C, -1.0 + 0.5 * k.delta_w);
    const double y_d1 = std::exp((k.delta - 1.0) * log_y);
    const double y_d = std::exp(k.delta * log_y);

    r.det_cf = c1dw * k.delta * y_d1 * Cpow * (1.0 + (k.c4 - 1.0) * k.g_w * D * sc);
    r.trace_cf = -c1dw * k.delta_w * y_d * Cpow * D * sc +
                 (1.0 / y) * (p.alpha_w / (p.E_w * p.E_v * C)) * (A_of_phi_printed(e.phi, p) - reversal_level(p));

    if (opts.bump) {
        r.det_exact = r.trace_exact = std::numeric_limits<double>::quiet_NaN();
    } else {
        r.det_exact = k.c4 * c1dw * k.delta * y_d1 * Cpow;
        const double dyw_dx = -k.c4 * c1dw * k.delta_w * y_d * Cpow * D * sc;
        r.trace_exact = dyw_dx - e.dxw_ds;
    }

    r.det_discrepancy = rel_diff(r.det_fd, r.det_cf) > rel_tol;
    r.trace_discrepancy = rel_diff(r.trace_fd, r.trace_cf) > rel_tol;
    r.eigen_class = classify_eigen(r.trace_fd, r.det_fd);
    return r;
}

StripHyperbolicity strip_hyperbolicity(const StripFamily& fam, const SaddleParams& p, int s_samples,
                                       const ReturnMapOptions& opts) {
    StripHyperbolicity h;
    for (const Strip& st : fam.strips) {
        for (std::size_t j = 0; j < st.t.size(); ++j) {
            for (int q = 0; q < s_samples; ++q) {
                const double frac = (q + 0.5) / s_samples;
                const double y = std::exp(std::log(st.a[j]) + frac * (std::log(st.b[j]) - std::log(st.a[j])));
                const JacobianReport r = jacobian_report(st.t[j], y, p, opts);
                ++h.samples;
                if (r.eigen_class == EigenClass::Saddle) ++h.saddles;
                if (r.det_discrepancy) ++h.det_flags;
                if (r.trace_discrepancy) ++h.trace_flags;
                h.y_star = std::max(h.y_star, y);
            }
        }
    }
    return h;
}

namespace {

// wrap(x_w(g^{n-2}(0, s)) - x0), or nothing when an intermediate return
// leaves (min_y, eps].
std::optional<double> pulse_defect(double s, int n, const DerivedConstants& k, double x0, double min_y,
                                   std::vector<WallPoint>* chain) {
    if (!(s > 0.0) || s > k.eps) return std::nullopt;
    ReturnMapOptions ropts;
    ropts.x_stable = x0;
    WallPoint pt{WallSection::In_v, 0.0, s};
    if (chain) chain->assign(1, pt);
    for (int i = 0; i < n - 2; ++i) {
        const RawImage r = raw_return(pt.x, pt.y, k, ropts);
        pt = WallPoint{WallSection::In_v, r.x, wrap_pi(r.y)};
        if (!(pt.y >= min_y) || pt.y > k.eps) return std::nullopt;
        if (chain) chain->push_back(pt);
    }
    return wrap_pi(eta(pt.x, pt.y, k).x_w - x0);
}

// Sign changes of the defect along a parametrised family s(u), ignoring
// jumps of the wrapped angle.
template <class S>
std::vector<double> scan_roots(S s_of_u, double u_lo, double u_hi, int grid, int n, const DerivedConstants& k,
                               double x0, double min_y) {
    std::vector<double> roots;
    auto F = [&](double u) { return pulse_defect(s_of_u(u), n, k, x0, min_y, nullptr); };
    std::optional<double> prev = F(u_lo);
    double u_prev = u_lo;
    for (int i = 1; i <= grid; ++i) {
        const double u = u_lo + (u_hi - u_lo) * i / grid;
        const std::optional<double> cur = F(u);
        if (prev && cur && std::abs(*prev) < kPi / 2 && std::abs(*cur) < kPi / 2 &&
            ((*prev < 0.0) != (*cur < 0.0))) {
            double lo = std::min(u_prev, u);
            double hi = std::max(u_prev, u);
            const bool lo_negative = (u_prev < u ? *prev : *cur) < 0.0;
            bool valid = true;
            for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const std::optional<double> fm = F(mid);
                if (!fm) {
                    valid = false;
                    break;
                }
                if ((*fm < 0.0) == lo_negative) lo = mid;
                else hi = mid;
            }
            // A sign change across a jump of the quantised s is not a root.
            const double root = s_of_u(0.5 * (lo + hi));
            const std::optional<double> f_root = valid ? F(0.5 * (lo + hi)) : std::nullopt;
            if (f_root && std::abs(*f_root) < 1e-9) roots.push_back(root);
        }
        prev = cur;
        u_prev = u;
    }
    return roots;
}

}  // namespace

std::vector<PulsePoint> find_multipulse(int n, const SaddleParams& p, double x0, const MultipulseOptions& opts) {
    if (n < 2) throw ValidationError("n", "pulse count must be >= 2");
    const DerivedConstants k = derive_constants(p);
    const double s_max = opts.s_max > 0.0 ? opts.s_max : p.eps;
    if (!(opts.s_min > 0.0) || !(opts.s_min < s_max) || s_max > p.eps) {
        throw ValidationError("s_window", "need 0 < s_min < s_max <= eps");
    }

    std::vector<double> level = scan_roots([](double u) { return std::exp(u); }, std::log(opts.s_min),
                                           std::log(s_max), opts.grid, 2, k, x0, opts.min_intermediate_y);
    for (int m = 3; m <= n && !level.empty(); ++m) {
        std::vector<double> next;
        const std::size_t seeds = std::min(level.size(), opts.max_seeds);
        for (std::size_t i = 0; i < seeds; ++i) {
            const double seed = level[i];
            for (double side : {-1.0, 1.0}) {
                auto s_of_u = [seed, side](double u) { return seed * (1.0 + side * std::exp(u)); };
                auto found = scan_roots(s_of_u, std::log(0.5), std::log(1e-9), opts.grid / 4, m, k, x0,
                                        opts.min_intermediate_y);
                for (double s : found)
                    if (s > 0.0 && s <= s_max) next.push_back(s);
            }
        }
        level = std::move(next);
    }

    std::vector<PulsePoint> out;
    for (double s : level) {
        if (out.size() >= opts.max_points) break;
        PulsePoint pt;
        pt.n = n;
        pt.s = s;
        const auto defect = pulse_defect(s, n, k, x0, opts.min_intermediate_y, &pt.chain);
        if (!defect) continue;
        pt.residual = std::abs(*defect);
        pt.x_w_final = eta(pt.chain.back().x, pt.chain.back().y, k).x_w;
        out.push_back(std::move(pt));
    }
    return out;
}

double replay_pulse(const PulsePoint& pt, const SaddleParams& p, double x0) {
    const DerivedConstants k = derive_constants(p);
    ReturnMapOptions ropts;
    ropts.x_stable = x0;
    WallPoint cur{WallSection::In_v, 0.0, pt.s};
    for (int i = 0; i < pt.n - 2; ++i) cur = return_map_by_composition(cur, k, ropts);
    return circle_distance(eta_by_composition(cur.x, cur.y, k).x_w, x0);
}

}  // namespace bykov
