#include "bykov/returncurve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bykov/common.hpp"

namespace bykov {

double C_of_phi(double phi, double a) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return a * a * c * c + s * s / (a * a);
}

double Phi_of_phi(double phi, double a) {
    const double quarter = std::floor(2.0 * phi / kPi);
    const double centre = (quarter + 0.5) * (kPi / 2.0);
    const double base = std::atan2(std::sin(phi) / a, a * std::cos(phi));
    // The image direction stays in the quadrant of phi, so it lies within
    // pi/4 of the centre of that quarter-turn.
    return base + kTwoPi * std::round((centre - base) / kTwoPi);
}

double scaled_dxw(double phi, const DerivedConstants& k) {
    const double shear = k.a * k.a - 1.0 / (k.a * k.a);
    const double C = C_of_phi(phi, k.a);
    const double sc = std::sin(phi) * std::cos(phi);
    return -(k.g_w * k.delta_v + (k.g_v / C) * (k.g_w * shear * sc + 1.0));
}

ReturnCurveSample eta_log(double t, double log_s, const DerivedConstants& k) {
    ReturnCurveSample out;
    out.t = t;
    out.log_s = log_s;
    out.s = std::exp(log_s);
    out.phi = -k.g_v * log_s + t + k.c2;
    const double C = C_of_phi(out.phi, k.a);
    out.x_w = -k.g_w * k.delta_v * log_s - 0.5 * k.g_w * std::log(C) + Phi_of_phi(out.phi, k.a) + k.c3 -
              k.g_w * std::log(k.c1);
    const double log_y = std::log(k.c4) + k.delta_w * std::log(k.c1) + k.delta * log_s + 0.5 * k.delta_w * std::log(C);
    out.y_w = std::exp(log_y);
    out.dxw_ds = scaled_dxw(out.phi, k) / out.s;
    return out;
}

ReturnCurveSample eta(double t, double s, const DerivedConstants& k) {
    if (!(s > 0.0)) throw ValidationError("s", "curve parameter must be positive");
    ReturnCurveSample out = eta_log(t, std::log(s), k);
    out.s = s;
    return out;
}

ReturnCurveSample eta(double t, double s, const SaddleParams& p) { return eta(t, s, derive_constants(p)); }

ReturnCurveSample eta_by_composition(double t, double s, const DerivedConstants& k) {
    if (!(s > 0.0)) throw ValidationError("s", "curve parameter must be positive");

    auto image_on_In_w = [&](double si, double hint) {
        const DiskPoint out_v = phi_v(WallPoint{WallSection::In_v, t, si}, k);
        const RectPoint in_w = psi_vw(polar_rect(out_v), k.a);
        return rect_polar(in_w, hint);
    };

    // Walk from s = eps (where the spiral angle equals t) down to s, with
    // steps small enough that the image angle moves by less than pi/4.
    const double log_start = std::log(k.eps);
    const double log_end = std::log(s);
    const double phi_span = std::abs(k.g_v * (log_end - log_start));
    const double max_step = (kPi / 4.0) / (k.a * k.a);
    const auto steps = static_cast<long>(std::ceil(phi_span / max_step)) + 1;

    DiskPoint spiral = image_on_In_w(k.eps, t);
    for (long i = 1; i <= steps; ++i) {
        const double log_si = log_start + (log_end - log_start) * static_cast<double>(i) / static_cast<double>(steps);
        const double si = (i == steps) ? s : std::exp(log_si);
        spiral = image_on_In_w(si, spiral.phi);
    }
    const WallPoint out_w = phi_w(spiral, k);

    ReturnCurveSample out;
    out.t = t;
    out.s = s;
    out.log_s = log_end;
    out.phi = phi_v(WallPoint{WallSection::In_v, t, s}, k).phi;
    out.x_w = out_w.x;
    out.y_w = out_w.y;
    out.dxw_ds = std::numeric_limits<double>::quiet_NaN();
    return out;
}

double A_of_phi(double phi, const SaddleParams& p) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double a2 = p.a * p.a;
    return p.C_v * a2 * c * c + (p.C_v / a2) * s * s + p.alpha_v * (a2 - 1.0 / a2) * s * c;
}

double dA_dphi(double phi, const SaddleParams& p) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double a2 = p.a * p.a;
    return (a2 - 1.0 / a2) * (p.alpha_v * c * c - 2.0 * p.C_v * c * s - p.alpha_v * s * s);
}

double A_of_phi_printed(double phi, const SaddleParams& p) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double a2 = p.a * p.a;
    return p.C_v * a2 * c * c + (p.C_v / a2) * s * s + 2.0 * p.alpha_v * (a2 - 1.0 / a2) * s * c;
}

namespace {

// Golden-section search for a minimum of f on [lo, hi].
template <class F>
double golden_minimise(F f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

double quadratic_form(double phi, const SaddleParams& p) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return p.alpha_v * c * c - 2.0 * p.C_v * c * s - p.alpha_v * s * s;
}

double reduce_to_period(double phi) {
    double r = std::fmod(phi, kPi);
    if (r < 0.0) r += kPi;
    return r >= kPi ? 0.0 : r;
}

}  // namespace

AExtrema A_extrema(const SaddleParams& p, int grid_points) {
    p.validate();
    AExtrema ext;
    const double a2 = p.a * p.a;
    const double mean = 0.5 * p.C_v * (a2 + 1.0 / a2);
    const double amplitude = 0.5 * (a2 - 1.0 / a2) * std::hypot(p.C_v, p.alpha_v);
    ext.closed_form_min = mean - amplitude;
    ext.closed_form_max = mean + amplitude;

    if (p.a == 1.0) {
        ext.A_min = ext.A_max = p.C_v;
        return ext;
    }

    const double h = kPi / grid_points;
    int i_min = 0, i_max = 0;
    double v_min = std::numeric_limits<double>::infinity();
    double v_max = -v_min;
    for (int i = 0; i < grid_points; ++i) {
        const double v = A_of_phi(i * h, p);
        if (v < v_min) { v_min = v; i_min = i; }
        if (v > v_max) { v_max = v; i_max = i; }
    }
    auto A = [&p](double phi) { return A_of_phi(phi, p); };
    const double arg_min = golden_minimise(A, (i_min - 1) * h, (i_min + 1) * h, 1e-12);
    const double arg_max = golden_minimise([&A](double phi) { return -A(phi); }, (i_max - 1) * h, (i_max + 1) * h, 1e-12);

    ext.phi_min = reduce_to_period(arg_min);
    ext.phi_max = reduce_to_period(arg_max);
    ext.A_min = std::min(v_min, A(arg_min));
    ext.A_max = std::max(v_max, A(arg_max));
    ext.q_residual_min = std::abs(quadratic_form(arg_min, p));
    ext.q_residual_max = std::abs(quadratic_form(arg_max, p));
    return ext;
}

std::string_view to_string(ReversalKind k) {
    switch (k) {
        case ReversalKind::Maximum: return "max";
        case ReversalKind::Minimum: return "min";
        case ReversalKind::Inflection: return "inflection";
    }
    return "unknown";
}

namespace {

// Sign of d2x_w/ds2 at a root of s dx_w/ds: equal to -sign(d/dphi of s dx_w/ds).
ReversalKind classify_reversal(double phi, const DerivedConstants& k) {
    const double h = 1e-6;
    const double slope = (scaled_dxw(phi + h, k) - scaled_dxw(phi - h, k)) / (2.0 * h);
    return slope > 0.0 ? ReversalKind::Maximum : ReversalKind::Minimum;
}

}  // namespace

ReversalAngles reversal_angles(const SaddleParams& p, const AExtrema& ext, int grid_points) {
    ReversalAngles out;
    const double K = reversal_level(p);
    if (p.a == 1.0) return out;
    if (std::abs(K - ext.A_min) < 1e-9 || std::abs(K - ext.A_max) < 1e-9) {
        out.tangential = true;
        out.phi.push_back(std::abs(K - ext.A_min) < 1e-9 ? ext.phi_min : ext.phi_max);
        out.kind.push_back(ReversalKind::Inflection);
        return out;
    }
    if (K < ext.A_min || K > ext.A_max) return out;

    const DerivedConstants k = derive_constants(p);
    auto f = [&](double phi) { return A_of_phi(phi, p) - K; };
    const double h = kPi / grid_points;
    for (int i = 0; i < grid_points; ++i) {
        double lo = i * h;
        double hi = (i + 1) * h;
        double f_lo = f(lo);
        const double f_hi = f(hi);
        if (f_lo == 0.0) {
            out.phi.push_back(lo);
            continue;
        }
        if ((f_lo < 0.0) == (f_hi < 0.0) || f_hi == 0.0) continue;
        while (hi - lo > 1e-13) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = f(mid);
            if ((f_mid < 0.0) == (f_lo < 0.0)) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        out.phi.push_back(reduce_to_period(0.5 * (lo + hi)));
    }
    std::sort(out.phi.begin(), out.phi.end());
    for (double phi : out.phi) out.kind.push_back(classify_reversal(phi, k));
    return out;
}

ReversalSequence reversal_sequence(double t, std::size_t n_max, const SaddleParams& p, const ClassifyOptions& opts) {
    const DerivedConstants k = derive_constants(p);
    const Region region = classify_region(p, opts);

    ReversalSequence seq;
    seq.t = t;
    seq.region = region.tag;
    switch (region.tag) {
        case RegionTag::NoReversal_aEq1:
            seq.reason = "NoReversal_aEq1: x_w is monotone when a = 1";
            return seq;
        case RegionTag::OutsideB:
            seq.reason = "OutsideB: K lies outside [min A, max A]";
            return seq;
        default:
            break;
    }

    const AExtrema ext = A_extrema(p);
    const ReversalAngles roots = reversal_angles(p, ext);
    if (roots.phi.empty()) {
        seq.reason = "no roots of A = K found";
        return seq;
    }
    seq.inflection = roots.tangential;

    // s <= eps  <=>  phi >= t + c2 - g_v ln eps
    const double phi_floor = t + k.c2 - k.g_v * std::log(p.eps);
    const double log_s_floor = std::log(1e-300);
    auto m = static_cast<long>(std::floor(phi_floor / kPi)) - 1;
    while (seq.size() < n_max) {
        bool underflow = false;
        for (std::size_t i = 0; i < roots.phi.size() && seq.size() < n_max; ++i) {
            const double phi = roots.phi[i] + static_cast<double>(m) * kPi;
            const double log_s = (k.c2 + t - phi) / k.g_v;
            if (log_s > std::log(p.eps)) continue;
            if (log_s < log_s_floor) {
                underflow = true;
                break;
            }
            const ReturnCurveSample smp = eta_log(t, log_s, k);
            seq.s_values.push_back(smp.s);
            seq.log_s.push_back(log_s);
            seq.phi_values.push_back(smp.phi);
            seq.x_values.push_back(smp.x_w);
            seq.y_values.push_back(smp.y_w);
            seq.kinds.push_back(roots.kind[i]);
        }
        if (underflow) break;
        ++m;
    }
    if (seq.empty()) seq.reason = "no reversal with s in (0, eps]";
    return seq;
}

double rotation_lemma_residual(double s0, int n, double t, const SaddleParams& p) {
    if (!(s0 > 0.0) || s0 > p.eps) throw ValidationError("s0", "must lie in (0, eps]");
    if (n < 0) throw ValidationError("n", "must be non-negative");
    const DerivedConstants k = derive_constants(p);
    const double log_s0 = std::log(s0);
    const double log_s1 = log_s0 - n * kPi / k.g_v;
    const double x0 = eta_log(t, log_s0, k).x_w;
    const double x1 = eta_log(t, log_s1, k).x_w;
    return std::abs(x1 - x0 - n * kPi * (1.0 - k.gamma));
}

double max_circle_gap(const std::vector<double>& x_values) {
    if (x_values.empty()) return kTwoPi;
    std::vector<double> r;
    r.reserve(x_values.size());
    for (double x : x_values) r.push_back(mod_two_pi(x));
    std::sort(r.begin(), r.end());
    double gap = r.front() + kTwoPi - r.back();
    for (std::size_t i = 1; i < r.size(); ++i) gap = std::max(gap, r[i] - r[i - 1]);
    return gap;
}

TangencyReport find_tangency(double x0, double t, std::size_t n_max, const SaddleParams& p,
                             const ClassifyOptions& opts) {
    const ReversalSequence seq = reversal_sequence(t, n_max, p, opts);
    if (seq.empty()) throw NoTangencyError("no reversal points available: " + seq.reason);

    TangencyReport rep;
    rep.region = seq.region;
    if (seq.region == RegionTag::InteriorB_GammaRational) {
        rep.warning = "gamma is rational within tolerance: reversal angles form a finite set";
    } else if (seq.region == RegionTag::BoundaryB) {
        rep.warning = "parameters on the boundary of B: reversal points are inflections";
    }

    rep.distance = std::numeric_limits<double>::infinity();
    std::size_t checkpoint = 1;
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const double d = circle_distance(seq.x_values[n], x0);
        // Improvements below the rounding level of x_w do not move the
        // choice deeper into the sequence.
        if (d < rep.distance - 1e-12 * std::max(1.0, std::abs(seq.x_values[n]))) {
            rep.distance = d;
            rep.index = n;
        }
        if (n + 1 == checkpoint || n + 1 == seq.size()) {
            rep.history.emplace_back(n + 1, rep.distance);
            if (n + 1 == checkpoint) checkpoint *= 10;
        }
    }
    rep.s = seq.s_values[rep.index];
    rep.x_w = seq.x_values[rep.index];
    rep.y_w = seq.y_values[rep.index];

    // Support of the bump: half the distance to the section boundary y = 0
    // and to every other reversal point, so no other reversal is moved.
    double clearance = rep.y_w;
    for (std::size_t n = 0; n < seq.size(); ++n) {
        if (n == rep.index) continue;
        const double dx = wrap_pi(seq.x_values[n] - rep.x_w);
        const double dy = seq.y_values[n] - rep.y_w;
        clearance = std::min(clearance, std::hypot(dx, dy));
    }
    rep.bump = Bump{wrap_pi(x0 - rep.x_w), rep.x_w, rep.y_w, 0.5 * clearance};
    return rep;
}

}  // namespace bykov
