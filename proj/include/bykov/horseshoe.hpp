#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bykov/localmaps.hpp"
#include "bykov/params.hpp"
#include "bykov/returncurve.hpp"

namespace bykov {

struct ReturnMapOptions {
    std::optional<Bump> bump;
    double x_stable = 0.0;  ///< angle of W^s(v) on Out(w)
};

/// First return map g = psi_wv o eta on In(v).
WallPoint return_map(const WallPoint& p, const DerivedConstants& k, const ReturnMapOptions& opts = {});

/// Same map with eta replaced by the composition of the local maps.
WallPoint return_map_by_composition(const WallPoint& p, const DerivedConstants& k,
                                    const ReturnMapOptions& opts = {});

/// The four parameter cases of the strip construction.
enum class StripCase {
    I,    ///< x_w monotone in s (outside B, or a = 1)
    II,   ///< reversals, gamma rational
    III,  ///< reversals, gamma irrational
    IV,   ///< boundary of B: reversals degenerate to inflections
};
std::string_view to_string(StripCase c);
StripCase strip_case_for(RegionTag tag);

/// One horizontal strip {a(t) <= s <= b(t)} in the rectangle [0, tau]^2 of In(v).
struct Strip {
    int n = 0;
    long level = 0;       ///< the crossing at x_w = 2 pi level (and 2 pi level - tau)
    double phi_lo = 0.0;  ///< monotone interval of x_w, in the Out(v) angle
    double phi_hi = 0.0;
    int direction = 1;    ///< sign of dx_w/ds on the strip
    std::vector<double> t;
    std::vector<double> a;
    std::vector<double> b;
};

struct StripFamily {
    double tau_requested = 0.0;
    double tau = 0.0;  ///< effective size after any shrinking
    StripCase strip_case = StripCase::I;
    RegionTag region = RegionTag::OutsideB;
    std::vector<Strip> strips;
    std::string note;  ///< why tau was shrunk, or why the list stopped
};

class UnsupportedResonanceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class PeriodicTangencyError : public std::runtime_error {
public:
    PeriodicTangencyError(const std::string& what, std::size_t witness, double x_w)
        : std::runtime_error(what), witness_(witness), x_w_(x_w) {}
    std::size_t witness() const noexcept { return witness_; }
    double x_w() const noexcept { return x_w_; }

private:
    std::size_t witness_;
    double x_w_;
};

struct StripOptions {
    int t_samples = 33;
    double x_stable = 0.0;
    std::size_t tangency_probe = 1000;
    ClassifyOptions classify;
};

/// Horizontal strips whose boundaries satisfy x_w = x_stable - tau and
/// x_w = x_stable (mod 2 pi), on monotone pieces of x_w(t, .).
/// Throws UnsupportedResonanceError for gamma = 1 and PeriodicTangencyError
/// when a reversal point sits on the trace of W^s(v).
StripFamily build_strips(double tau, int n_limit, const SaddleParams& p, const StripOptions& opts = {});

struct StripCheck {
    bool ok = true;
    std::vector<std::string> failures;
    double max_level_error = 0.0;  ///< worst |x_w - target| (mod 2 pi) on the boundaries
    double image_y_min = 0.0;      ///< y-range of the boundary images under g
    double image_y_max = 0.0;
    double image_x_min = 0.0;
    double image_x_max = 0.0;
};

/// Replays every invariant of a strip family: boundary levels, ordering,
/// monotonicity, constant sign of A - K, disjointness, a_n -> 0, and the
/// image of the boundaries under g spanning the rectangle vertically.
StripCheck check_strip_invariants(const StripFamily& fam, const SaddleParams& p, double x_stable = 0.0,
                                  double tol = 1e-9);

struct PeriodicTangency {
    bool found = false;
    std::size_t witness = 0;
    double x_w = 0.0;
    double distance = 0.0;  ///< closest circle distance seen
};

/// A reversal point x_w(s_n), n < n_probe, lying on x0 (mod 2 pi) within
/// 1e-9. Only meaningful for rational gamma; false for any other region.
PeriodicTangency detect_periodic_tangency(const SaddleParams& p, double x0, std::size_t n_probe,
                                          const ClassifyOptions& opts = {});

enum class EigenClass { Saddle, DoubleContraction, DoubleExpansion, NonHyperbolic };
std::string_view to_string(EigenClass c);

/// Classification from the eigenvalues of a real 2x2 matrix with the given
/// trace and determinant. Non-hyperbolic when a modulus is within tol of 1.
EigenClass classify_eigen(double trace, double det, double tol = 1e-6);

struct JacobianReport {
    double x = 0.0;
    double y = 0.0;
    double phi = 0.0;
    double jac_fd[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double det_fd = 0.0;
    double trace_fd = 0.0;
    double fd_error = 0.0;  ///< relative change of (det, trace) between the h/2 and extrapolated estimates
    double det_cf = 0.0;    ///< printed closed form
    double trace_cf = 0.0;  ///< printed closed form
    double det_exact = 0.0;  ///< derivative of the implemented map, in closed form
    double trace_exact = 0.0;
    bool det_discrepancy = false;
    bool trace_discrepancy = false;
    EigenClass eigen_class = EigenClass::NonHyperbolic;  ///< from the fd pair
};

/// Finite-difference Jacobian of g at (x, y) compared with the closed forms.
JacobianReport jacobian_report(double x, double y, const SaddleParams& p, const ReturnMapOptions& opts = {},
                               double rel_tol = 1e-6);

struct StripHyperbolicity {
    std::size_t samples = 0;
    std::size_t saddles = 0;
    std::size_t det_flags = 0;
    std::size_t trace_flags = 0;
    double y_star = 0.0;  ///< largest sampled y
    double fraction() const { return samples ? static_cast<double>(saddles) / static_cast<double>(samples) : 0.0; }
};

/// Jacobian classification at a grid of points inside each strip.
StripHyperbolicity strip_hyperbolicity(const StripFamily& fam, const SaddleParams& p, int s_samples = 5,
                                       const ReturnMapOptions& opts = {});

/// A point P = (0, s) of W^u(w) on In(v) whose orbit returns n - 2 times
/// to In(v) and then lands on W^s(v) in Out(w).
struct PulsePoint {
    int n = 2;
    double s = 0.0;
    std::vector<WallPoint> chain;  ///< P, g(P), ..., g^{n-2}(P)
    double x_w_final = 0.0;
    double residual = 0.0;         ///< circle distance of the final x_w to x0
};

struct MultipulseOptions {
    double s_min = 1e-12;
    double s_max = 0.0;  ///< 0 means eps
    int grid = 20000;
    std::size_t max_points = 20;
    std::size_t max_seeds = 8;
    double min_intermediate_y = 1e-6;
};

std::vector<PulsePoint> find_multipulse(int n, const SaddleParams& p, double x0, const MultipulseOptions& opts = {});

/// Distance to x0 of the final x_w of the pulse orbit replayed through the
/// composition of local maps.
double replay_pulse(const PulsePoint& pt, const SaddleParams& p, double x0);

}  // namespace bykov
