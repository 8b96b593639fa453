#pragma once

#include <optional>
#include <string_view>

#include "bykov/params.hpp"

namespace bykov {

// Cross sections of the cylinders V (around v) and W (around w).
// Walls carry (angle x, height y); tops carry polar (r, phi).
enum class WallSection { In_v, Out_w };
enum class DiskSection { Out_v, In_w };

std::string_view to_string(WallSection s);
std::string_view to_string(DiskSection s);

/// Point on a cylinder wall. `x` is kept unreduced.
struct WallPoint {
    WallSection section = WallSection::In_v;
    double x = 0.0;
    double y = 0.0;
};

/// Point on a cylinder top in polar form. `phi` is kept unreduced: the
/// winding count of a spiral is part of the data.
struct DiskPoint {
    DiskSection section = DiskSection::Out_v;
    double r = 0.0;
    double phi = 0.0;
};

/// Rectangular coordinates on a cylinder top.
struct RectPoint {
    DiskSection section = DiskSection::Out_v;
    double X = 0.0;
    double Y = 0.0;
};

/// Local map near v: In(v) -> Out(v),
/// (x, y) -> (c1 y^delta_v, -g_v ln y + x + c2).
/// Throws InvariantManifoldError for y == 0 (the point sits on W^s(v)).
DiskPoint phi_v(const WallPoint& p, const DerivedConstants& k);

/// Local map near w: In(w) -> Out(w),
/// (r, phi) -> (c3 - g_w ln r + phi, c4 r^delta_w).
/// Throws InvariantManifoldError for r == 0 (the point sits on W^s(w)).
WallPoint phi_w(const DiskPoint& p, const DerivedConstants& k);

/// Transition Out(v) -> In(w): (X, Y) -> (a X, Y / a).
RectPoint psi_vw(const RectPoint& p, double a);

/// C-infinity bump with compact support on a disk of the wall Out(w):
/// amplitude * exp(1 - 1 / (1 - (d / radius)^2)) for d < radius, else 0.
/// The x-distance to the centre is measured on the circle.
struct Bump {
    double amplitude = 0.0;
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 1.0;

    void validate() const;
    double operator()(double x, double y) const;
};

/// Transition Out(w) -> In(v): a quarter turn of the local chart that takes
/// the trace of W^u(w) ({y = 0} on Out(w)) onto the segment {x = 0} of In(v)
/// and the trace of W^s(v) ({x = x_stable} on Out(w)) onto {y = 0}:
///
///     (x, y) -> (y, wrap(x_stable - (x + bump(x, y))))
///
/// The optional bump displaces x before turning, which moves the trace of
/// W^s(v) on Out(w) without touching the curve eta.
WallPoint psi_wv(const WallPoint& p, const std::optional<Bump>& bump = std::nullopt,
                 double x_stable = 0.0);

RectPoint polar_rect(const DiskPoint& p);

/// Inverse of polar_rect. The angle is the branch closest to `branch_hint`.
/// Throws InvariantManifoldError at the origin (the one-dimensional
/// connection).
DiskPoint rect_polar(const RectPoint& p, double branch_hint);

}  // namespace bykov
