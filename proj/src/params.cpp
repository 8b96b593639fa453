#include "bykov/params.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "bykov/common.hpp"
#include "bykov/returncurve.hpp"

namespace bykov {

void SaddleParams::validate() const {
    const std::array<std::pair<const char*, double>, 6> rates{{
        {"alpha_v", alpha_v},
        {"C_v", C_v},
        {"E_v", E_v},
        {"alpha_w", alpha_w},
        {"C_w", C_w},
        {"E_w", E_w},
    }};
    for (const auto& [name, value] : rates) {
        if (!std::isfinite(value) || !(value > 0.0)) {
            throw ValidationError(name, "must be a finite positive rate");
        }
    }
    if (!std::isfinite(a) || !(a >= 1.0)) throw ValidationError("a", "shear must satisfy a >= 1");
    if (!std::isfinite(eps) || !(eps > 0.0)) throw ValidationError("eps", "section size must be positive");
}

DerivedConstants derive_constants(const SaddleParams& p) {
    p.validate();
    DerivedConstants k{};
    k.delta_v = p.C_v / p.E_v;
    k.delta_w = p.C_w / p.E_w;
    k.delta = k.delta_v * k.delta_w;
    k.g_v = p.alpha_v / p.E_v;
    k.g_w = -p.alpha_w / p.E_w;
    k.gamma = (p.alpha_w / p.alpha_v) * (p.C_v / p.E_w);
    const double log_eps = std::log(p.eps);
    k.c1 = std::pow(p.eps, 1.0 - k.delta_v);
    k.c2 = k.g_v * log_eps;
    k.c3 = k.g_w * log_eps;
    k.c4 = std::pow(p.eps, 1.0 - k.delta_w);
    k.a = p.a;
    k.eps = p.eps;
    return k;
}

double reversal_level(const SaddleParams& p) { return p.alpha_v * p.E_w / p.alpha_w; }

Rationality is_gamma_rational(double gamma, double tol, std::int64_t q_max) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma", "must be finite and positive");
    if (q_max < 1) throw ValidationError("q_max", "must be >= 1");

    // Convergents h_n / k_n of the continued fraction of gamma.
    std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(gamma));
    std::int64_t k_prev = 0, k = 1;
    Rationality best{false, h, k, std::abs(gamma - static_cast<double>(h))};
    double rem = gamma - std::floor(gamma);
    for (int iter = 0; iter < 64 && rem > 0.0; ++iter) {
        const double inv = 1.0 / rem;
        if (!std::isfinite(inv) || inv > 1e18) break;
        const auto digit = static_cast<std::int64_t>(std::floor(inv));
        rem = inv - std::floor(inv);
        const std::int64_t h_next = digit * h + h_prev;
        const std::int64_t k_next = digit * k + k_prev;
        if (k_next > q_max || k_next <= 0) break;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        const double err = std::abs(gamma - static_cast<double>(h) / static_cast<double>(k));
        if (err < best.error) best = Rationality{false, h, k, err};
        if (err == 0.0) break;
    }
    best.is_rational_within_tol = best.error < tol;
    return best;
}

std::string_view to_string(RegionTag tag) {
    switch (tag) {
        case RegionTag::NoReversal_aEq1: return "NoReversal_aEq1";
        case RegionTag::OutsideB: return "OutsideB";
        case RegionTag::BoundaryB: return "BoundaryB";
        case RegionTag::InteriorB_GammaRational: return "InteriorB_GammaRational";
        case RegionTag::DenseReversals_D: return "DenseReversals_D";
    }
    return "unknown";
}

bool printed_inequality_in_B(const SaddleParams& p) {
    const double shear = p.a * p.a - 1.0 / (p.a * p.a);
    const double root = std::sqrt(p.alpha_v * p.alpha_v + 4.0 * p.C_v * p.C_v);
    const double lower = shear * 2.0 * p.alpha_v / (p.C_v - root);
    const double upper = shear * 2.0 * p.alpha_v / (p.C_v + root);
    const double middle = p.E_w / p.alpha_w - p.a * p.a * p.C_v / p.alpha_v;
    return lower <= middle && middle <= upper;
}

Region classify_region(const SaddleParams& p, const ClassifyOptions& opts) {
    const DerivedConstants k = derive_constants(p);
    const AExtrema ext = A_extrema(p);

    Region region;
    region.A_min = ext.A_min;
    region.A_max = ext.A_max;
    region.K = reversal_level(p);
    region.gamma = k.gamma;
    region.gamma_rationality = is_gamma_rational(k.gamma, opts.rationality_tol, opts.q_max);
    region.printed_inequality_in_B = printed_inequality_in_B(p);

    if (p.a == 1.0) {
        region.tag = RegionTag::NoReversal_aEq1;
    } else if (std::abs(region.K - ext.A_min) < opts.boundary_tol ||
               std::abs(region.K - ext.A_max) < opts.boundary_tol) {
        region.tag = RegionTag::BoundaryB;
    } else if (region.K < ext.A_min || region.K > ext.A_max) {
        region.tag = RegionTag::OutsideB;
    } else if (region.gamma_rationality.is_rational_within_tol) {
        region.tag = RegionTag::InteriorB_GammaRational;
    } else {
        region.tag = RegionTag::DenseReversals_D;
    }
    return region;
}

namespace {
constexpr std::array<const char*, 8> kParamKeys{"alpha_v", "C_v", "E_v", "alpha_w",
                                                "C_w", "E_w", "a", "eps"};
}

SaddleParams saddle_params_from_json(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("<document>", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("<document>", "expected a JSON object");

    for (const auto& item : doc.items()) {
        bool known = false;
        for (const char* key : kParamKeys) known = known || item.key() == key;
        if (!known) throw ValidationError(item.key(), "unknown key");
    }
    auto fetch = [&doc](const char* key) {
        if (!doc.contains(key)) throw ValidationError(key, "missing");
        const auto& v = doc.at(key);
        if (!v.is_number()) throw ValidationError(key, "must be a number");
        return v.get<double>();
    };
    SaddleParams p;
    p.alpha_v = fetch("alpha_v");
    p.C_v = fetch("C_v");
    p.E_v = fetch("E_v");
    p.alpha_w = fetch("alpha_w");
    p.C_w = fetch("C_w");
    p.E_w = fetch("E_w");
    p.a = fetch("a");
    p.eps = fetch("eps");
    p.validate();
    return p;
}

std::string saddle_params_to_json(const SaddleParams& p) {
    nlohmann::ordered_json doc;
    doc["alpha_v"] = p.alpha_v;
    doc["C_v"] = p.C_v;
    doc["E_v"] = p.E_v;
    doc["alpha_w"] = p.alpha_w;
    doc["C_w"] = p.C_w;
    doc["E_w"] = p.E_w;
    doc["a"] = p.a;
    doc["eps"] = p.eps;
    return doc.dump(2);
}

}  // namespace bykov
