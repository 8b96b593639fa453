#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "bykov/params.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(BYKOV_FIXTURES) + "/" + name; }

inline std::string read(const std::string& name) {
    std::ifstream f(path(name));
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline bykov::SaddleParams load(const std::string& name) { return bykov::saddle_params_from_json(read(name)); }

/// Outside B, gamma = 2: x_w monotone in s.
inline bykov::SaddleParams case_i() { return load("case_i.json"); }
/// Dense reversals, gamma = sqrt 2.
inline bykov::SaddleParams dense_d() { return load("dense_d.json"); }
/// Interior of B with gamma = 3/2.
inline bykov::SaddleParams rational() { return load("rational.json"); }
/// K equal to max A.
inline bykov::SaddleParams boundary() { return load("boundary.json"); }

/// Random admissible parameters with moderate rates.
inline bykov::SaddleParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> rate(0.2, 3.0);
    std::uniform_real_distribution<double> shear(1.0, 3.0);
    std::uniform_real_distribution<double> size(0.1, 0.9);
    bykov::SaddleParams p;
    p.alpha_v = rate(rng);
    p.C_v = rate(rng);
    p.E_v = rate(rng);
    p.alpha_w = rate(rng);
    p.C_w = rate(rng);
    p.E_w = rate(rng);
    p.a = shear(rng);
    p.eps = size(rng);
    return p;
}

}  // namespace fixtures
