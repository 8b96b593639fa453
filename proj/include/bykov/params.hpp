#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bykov {

/// Linear part of the vector field at the two saddle-foci, plus the
/// transition shear and the cross-section size.
///
/// At v the eigenvalues are -C_v +- i alpha_v and E_v; at w they are
/// E_w +- i alpha_w and -C_w. The flow turns in opposite directions at
/// the two nodes (different chirality).
struct SaddleParams {
    double alpha_v = 1.0;
    double C_v = 1.0;
    double E_v = 1.0;
    double alpha_w = 1.0;
    double C_w = 1.0;
    double E_w = 1.0;
    double a = 2.0;    ///< shear of the v -> w transition, a >= 1
    double eps = 0.5;  ///< cylinder radius / half-height

    /// Throws ValidationError naming the first offending field.
    void validate() const;

    bool operator==(const SaddleParams&) const = default;
};

/// Everything the closed-form local maps need.
struct DerivedConstants {
    double delta_v;  ///< C_v / E_v
    double delta_w;  ///< C_w / E_w
    double delta;    ///< delta_v * delta_w
    double g_v;      ///< alpha_v / E_v
    double g_w;      ///< -alpha_w / E_w, negative by chirality
    double gamma;    ///< (alpha_w / alpha_v) (C_v / E_w)
    double c1;       ///< eps^(1 - delta_v)
    double c2;       ///< g_v ln eps
    double c3;       ///< g_w ln eps
    double c4;       ///< eps^(1 - delta_w)
    double a;
    double eps;
};

DerivedConstants derive_constants(const SaddleParams& p);

/// Level that A(phi) must reach for the return curve to reverse:
/// K = alpha_v E_w / alpha_w (equivalently C_v / gamma).
double reversal_level(const SaddleParams& p);

struct Rationality {
    bool is_rational_within_tol = false;
    std::int64_t p = 0;
    std::int64_t q = 1;
    double error = 0.0;  ///< |gamma - p/q|
};

/// Best continued-fraction convergent p/q of `gamma` with q <= q_max.
/// A floating-point surrogate for (ir)rationality: `gamma` counts as
/// rational when the best convergent is within `tol`.
Rationality is_gamma_rational(double gamma, double tol, std::int64_t q_max);

enum class RegionTag {
    NoReversal_aEq1,
    OutsideB,
    BoundaryB,
    InteriorB_GammaRational,
    DenseReversals_D,
};

std::string_view to_string(RegionTag tag);

struct Region {
    RegionTag tag = RegionTag::OutsideB;
    double A_min = 0.0;
    double A_max = 0.0;
    double K = 0.0;
    double gamma = 0.0;
    Rationality gamma_rationality;
    /// Verdict of the printed closed-form inequality for membership in B,
    /// kept as a consistency diagnostic only.
    bool printed_inequality_in_B = false;
};

struct ClassifyOptions {
    double rationality_tol = 1e-9;
    std::int64_t q_max = 1000;
    double boundary_tol = 1e-9;
};

Region classify_region(const SaddleParams& p, const ClassifyOptions& opts = {});

/// The closed-form membership test for B exactly as printed (radicand
/// alpha_v^2 + 4 C_v^2). Independent of the numeric extrema.
bool printed_inequality_in_B(const SaddleParams& p);

/// Parses a JSON object holding exactly the eight SaddleParams fields.
/// Unknown or missing keys throw ValidationError.
SaddleParams saddle_params_from_json(std::string_view json_text);
std::string saddle_params_to_json(const SaddleParams& p);

}  // namespace bykov
