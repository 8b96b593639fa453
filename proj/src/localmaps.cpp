#include "bykov/localmaps.hpp"

#include <cmath>

#include "bykov/common.hpp"

namespace bykov {

std::string_view to_string(WallSection s) { return s == WallSection::In_v ? "In_v" : "Out_w"; }
std::string_view to_string(DiskSection s) { return s == DiskSection::Out_v ? "Out_v" : "In_w"; }

DiskPoint phi_v(const WallPoint& p, const DerivedConstants& k) {
    if (p.section != WallSection::In_v) throw ValidationError("section", "phi_v expects a point on In(v)");
    if (p.y == 0.0) throw InvariantManifoldError("phi_v: point lies on the stable manifold of v");
    if (!(p.y > 0.0)) throw ValidationError("y", "height on In(v) must be positive");
    return DiskPoint{DiskSection::Out_v, k.c1 * std::pow(p.y, k.delta_v), -k.g_v * std::log(p.y) + p.x + k.c2};
}

WallPoint phi_w(const DiskPoint& p, const DerivedConstants& k) {
    if (p.section != DiskSection::In_w) throw ValidationError("section", "phi_w expects a point on In(w)");
    if (p.r == 0.0) throw InvariantManifoldError("phi_w: point lies on the stable manifold of w");
    if (!(p.r > 0.0)) throw ValidationError("r", "radius on In(w) must be positive");
    return WallPoint{WallSection::Out_w, k.c3 - k.g_w * std::log(p.r) + p.phi, k.c4 * std::pow(p.r, k.delta_w)};
}

RectPoint psi_vw(const RectPoint& p, double a) {
    return RectPoint{DiskSection::In_w, a * p.X, p.Y / a};
}

void Bump::validate() const {
    if (!(radius > 0.0)) throw ValidationError("bump.radius", "must be positive");
}

double Bump::operator()(double x, double y) const {
    const double dx = wrap_pi(x - center_x) / radius;
    const double dy = (y - center_y) / radius;
    const double rho2 = dx * dx + dy * dy;
    if (rho2 >= 1.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - rho2));
}

WallPoint psi_wv(const WallPoint& p, const std::optional<Bump>& bump, double x_stable) {
    if (p.section != WallSection::Out_w) throw ValidationError("section", "psi_wv expects a point on Out(w)");
    double x = p.x;
    if (bump) {
        bump->validate();
        x += (*bump)(p.x, p.y);
    }
    return WallPoint{WallSection::In_v, p.y, wrap_pi(x_stable - x)};
}

RectPoint polar_rect(const DiskPoint& p) {
    return RectPoint{p.section, p.r * std::cos(p.phi), p.r * std::sin(p.phi)};
}

DiskPoint rect_polar(const RectPoint& p, double branch_hint) {
    if (p.X == 0.0 && p.Y == 0.0) {
        throw InvariantManifoldError("rect_polar: point lies on the one-dimensional connection");
    }
    const double base = std::atan2(p.Y, p.X);
    const double turns = std::round((branch_hint - base) / kTwoPi);
    return DiskPoint{p.section, std::hypot(p.X, p.Y), base + kTwoPi * turns};
}

}  // namespace bykov
