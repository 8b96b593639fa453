#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bykov/params.hpp"

namespace bykov {

enum class Model {
    Dim3,            ///< symmetric seed system in R^3 (fourth state component unused)
    Example4d,       ///< lifted family on S^3, rotation rate x4 in the (x1, x2) plane
    StandardLift4d,  ///< same family with a constant rotation rate 1 (control case)
};

std::string_view to_string(Model m);
Model model_from_string(std::string_view s);

struct ModelConfig {
    double alpha1 = 1.0;
    double alpha2 = -0.1;
    double lambda = 0.0;
    Model model = Model::Example4d;

    /// alpha2 < 0 < alpha1 and alpha1 + alpha2 > 0.
    void validate() const;
};

using State = std::array<double, 4>;

State rhs(const State& x, const ModelConfig& cfg);

inline constexpr State kNodeV{0.0, 0.0, 0.0, 1.0};
inline constexpr State kNodeW{0.0, 0.0, 0.0, -1.0};

struct NodeSpectrum {
    double focus_re = 0.0;  ///< real part of the complex pair
    double focus_im = 0.0;  ///< imaginary part (taken positive)
    double real = 0.0;      ///< the remaining non-radial eigenvalue
    double radial = -2.0;
};

struct EquilibriaSpectrum {
    NodeSpectrum v;  ///< at (0, 0, 0, 1)
    NodeSpectrum w;  ///< at (0, 0, 0, -1)
    /// Rates of the abstract model: C_v = C_w = alpha1 - alpha2,
    /// E_v = E_w = alpha1 + alpha2, alpha_v = alpha_w = 1.
    SaddleParams saddle;
    double delta = 0.0;  ///< ((alpha2 - alpha1) / (alpha2 + alpha1))^2
};

EquilibriaSpectrum equilibria_spectrum(const ModelConfig& cfg);

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-30;
    double max_sample_gap = 0.05;  ///< bound on |x(t_i+1) - x(t_i)| in the output
    bool renormalize = false;      ///< project back onto r = 1 after each step
    std::size_t max_steps = 50'000'000;
};

struct TrajectorySeries {
    std::vector<double> times;
    std::vector<State> states;
    int dim = 4;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double max_error_estimate = 0.0;  ///< largest scaled local error of an accepted step
    double error_sum = 0.0;           ///< sum of unscaled local error norms
    bool renormalized = false;
    bool failed = false;
    std::string failure;
};

/// Dormand-Prince 5(4) with step-size control. Extra samples inside long
/// steps come from the pair's dense-output interpolant. Deterministic for
/// given inputs.
TrajectorySeries integrate(const State& x0, double T, const ModelConfig& cfg, const IntegratorOptions& opts = {});

struct SphereResidual {
    /// max |r^2(t) - r_exact^2(t)|, r_exact^2 the logistic solution of
    /// d(r^2)/dt = 2 r^2 (1 - r^2) from r^2(0); equals max |r^2 - 1| for a
    /// start on the sphere.
    double residual = 0.0;
    double max_abs_r2_minus_1 = 0.0;
    /// max |r^2 - 1| over the samples after r^2 first enters [1 - 1e-3, 1 + 1e-3];
    /// negative when it never does.
    double band_tail = -1.0;
    bool started_on_sphere = false;
};

/// Throws ValidationError for a series starting at the origin.
SphereResidual sphere_residual(const TrajectorySeries& series);

enum class Chirality { Same, Different, Inconclusive };
std::string_view to_string(Chirality c);

struct ChiralityReport {
    Chirality verdict = Chirality::Inconclusive;
    std::string message;
    std::size_t samples_v = 0;
    std::size_t samples_w = 0;
    double theta_dot_v_min = 0.0;
    double theta_dot_v_max = 0.0;
    double theta_dot_w_min = 0.0;
    double theta_dot_w_max = 0.0;
    /// max |x1 x2' - x2 x1' - rate (x1^2 + x2^2)| over all samples, with
    /// rate = x4 (Example4d) or 1 (StandardLift4d).
    double identity_residual = 0.0;
};

/// Angular velocity in the (x1, x2) plane along the samples within `radius`
/// of each node.
ChiralityReport chirality_check(const TrajectorySeries& series, const ModelConfig& cfg, double radius = 0.2);

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Dwell {
    char node = 'v';
    double t_enter = 0.0;
    double t_exit = 0.0;
    bool complete = true;  ///< false when the series ends inside the neighbourhood
    double duration() const { return t_exit - t_enter; }
};

struct SojournReport {
    std::vector<Dwell> dwells;  ///< visit order
    std::vector<double> ratios;  ///< consecutive same-node ratios, after the discarded transient
    double median_ratio = 0.0;
    std::size_t discarded = 0;
};

/// Dwell intervals within `radius` of v and w, crossing times interpolated
/// linearly. Throws InsufficientDataError with fewer than two complete dwells
/// or no ratio left after discarding.
SojournReport sojourn_analysis(const TrajectorySeries& series, double radius = 0.3, std::size_t discard = 2);

struct SubspaceResidual {
    int component = 0;  ///< 0-based index of a coordinate that starts at zero
    double max_abs = 0.0;
};

/// For every coordinate equal to zero at t = 0, the largest |value| along the run.
std::vector<SubspaceResidual> invariant_subspace_residuals(const TrajectorySeries& series);

/// kappa1-tilde: (x1, x2, x3, x4) -> (-x1, -x2, x3, x4).
State kappa1(const State& x);

}  // namespace bykov
