#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bykov/localmaps.hpp"
#include "bykov/params.hpp"

namespace bykov {

/// C(phi) = a^2 cos^2 phi + a^-2 sin^2 phi: squared stretch of the unit
/// direction phi under the v -> w transition.
double C_of_phi(double phi, double a);

/// Argument of (a cos phi, a^-1 sin phi), taken in the quarter-turn
/// [k pi/2, (k+1) pi/2] that contains phi.
double Phi_of_phi(double phi, double a);

/// One point of the curve eta(beta_t(s)) on Out(w), where
/// beta_t(s) = (t, s) is a vertical segment on In(v).
struct ReturnCurveSample {
    double s = 0.0;
    double log_s = 0.0;
    double t = 0.0;
    double phi = 0.0;  ///< angle on Out(v): -g_v ln s + t + c2
    double x_w = 0.0;  ///< unreduced angle on Out(w)
    double y_w = 0.0;
    double dxw_ds = 0.0;
};

/// Closed form of eta = Phi_w o Psi_vw o Phi_v along beta_t.
ReturnCurveSample eta(double t, double s, const DerivedConstants& k);
ReturnCurveSample eta(double t, double s, const SaddleParams& p);

/// Same as eta, parametrised by ln s. Stays finite when s underflows.
ReturnCurveSample eta_log(double t, double log_s, const DerivedConstants& k);

/// eta assembled from the individual local maps, with the winding of the
/// spiral on In(w) recovered by tracking the angle continuously from s = eps
/// down to s. Independent of the closed form; dxw_ds is not computed (NaN).
ReturnCurveSample eta_by_composition(double t, double s, const DerivedConstants& k);

/// s * dx_w/ds written as a function of phi; vanishes exactly at reversals.
double scaled_dxw(double phi, const DerivedConstants& k);

/// Reversal function: dx_w/ds = 0 iff A(phi) = K = alpha_v E_w / alpha_w.
/// A(phi) = C_v a^2 cos^2 + C_v a^-2 sin^2 + alpha_v (a^2 - a^-2) sin cos.
double A_of_phi(double phi, const SaddleParams& p);
double dA_dphi(double phi, const SaddleParams& p);

/// The printed variant with shear coefficient 2 alpha_v. Not used for any
/// decision; kept to quantify its disagreement with the derivative of x_w.
double A_of_phi_printed(double phi, const SaddleParams& p);

struct AExtrema {
    double A_min = 0.0;
    double A_max = 0.0;
    double phi_min = 0.0;  ///< argmin in [0, pi)
    double phi_max = 0.0;  ///< argmax in [0, pi)
    double closed_form_min = 0.0;
    double closed_form_max = 0.0;
    /// |Q(cos, sin)| at the refined arguments, Q the quadratic form whose
    /// zeros are the critical points of A.
    double q_residual_min = 0.0;
    double q_residual_max = 0.0;
    std::string method = "grid+refine";
};

/// Global extrema of A over one period by a dense grid and golden-section
/// refinement inside the bracketing cell.
AExtrema A_extrema(const SaddleParams& p, int grid_points = 100000);

enum class ReversalKind { Maximum, Minimum, Inflection };
std::string_view to_string(ReversalKind k);

/// Roots of A(phi) = K in [0, pi).
struct ReversalAngles {
    std::vector<double> phi;                  ///< ascending
    std::vector<ReversalKind> kind;
    bool tangential = false;                  ///< K at an extremum of A
};

ReversalAngles reversal_angles(const SaddleParams& p, const AExtrema& ext, int grid_points = 10000);

struct ReversalSequence {
    double t = 0.0;
    std::vector<double> s_values;   ///< strictly decreasing
    std::vector<double> log_s;
    std::vector<double> phi_values;
    std::vector<double> x_values;   ///< x_w(s_n), unreduced
    std::vector<double> y_values;
    std::vector<ReversalKind> kinds;
    RegionTag region = RegionTag::OutsideB;
    std::string reason;             ///< set when the sequence is empty
    bool inflection = false;        ///< boundary of B: points are inflections

    std::size_t size() const { return s_values.size(); }
    bool empty() const { return s_values.empty(); }
};

/// Points s_n in (0, eps] where x_w(t, .) has a vertical tangent, in
/// decreasing order, at most n_max of them. Stops before s drops below
/// 1e-300.
ReversalSequence reversal_sequence(double t, std::size_t n_max, const SaddleParams& p,
                                   const ClassifyOptions& opts = {});

/// |x_w(s0 e^{-n pi/g_v}) - x_w(s0) - n pi (1 - gamma)| along beta_t.
double rotation_lemma_residual(double s0, int n, double t, const SaddleParams& p);

class NoTangencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TangencyReport {
    std::size_t index = 0;    ///< index into the reversal sequence
    double s = 0.0;
    double x_w = 0.0;
    double y_w = 0.0;
    double distance = 0.0;    ///< circle distance from x_w(s_n) to x0
    Bump bump;                ///< perturbation of psi_wv creating the tangency
    RegionTag region = RegionTag::OutsideB;
    std::string warning;
    /// (n, best distance among the first n reversal points)
    std::vector<std::pair<std::size_t, double>> history;
};

/// Reversal point closest (mod 2 pi) to the trace x0 of W^s(v) on Out(w),
/// with the bump of psi_wv that moves that trace through it.
/// Throws NoTangencyError when there are no reversals.
TangencyReport find_tangency(double x0, double t, std::size_t n_max, const SaddleParams& p,
                             const ClassifyOptions& opts = {});

/// Largest gap between consecutive points of {x mod 2 pi} on the circle.
double max_circle_gap(const std::vector<double>& x_values);

}  // namespace bykov
