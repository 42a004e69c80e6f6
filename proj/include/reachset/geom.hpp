#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "reachset/errors.hpp"

namespace reachset {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi]; -pi maps to +pi.
double wrap_angle(double a);

struct Config2 {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

struct Config3 {
    Vec3 r = Vec3::Zero();
    Vec3 e = Vec3::UnitX();
};

struct Frame3 {
    Vec3 r = Vec3::Zero();
    Vec3 T = Vec3::UnitX();
    Vec3 N = Vec3::UnitY();
    Vec3 B = Vec3::UnitZ();
};

/// Rodrigues rotation of v about a unit axis.
Vec3 rotate(const Vec3& v, const Vec3& unit_axis, double angle);

/// Coordinate axis least aligned with e (ties in x, y, z order), projected
/// onto the plane orthogonal to e.
Vec3 reference_normal(const Vec3& e);

/// Unit normal to e obtained by turning the reference normal by psi about e.
Vec3 plane_normal(const Vec3& e, double psi);

/// Frame with T = c.e and N = plane_normal(c.e, psi).
Frame3 frame_from(const Config3& c, double psi);

/// Largest orthonormality / handedness defect of a frame.
double frame_defect(const Frame3& f);

/// Maps a planar configuration into the plane through base.r spanned by base.e
/// and plane_normal(base.e, psi).
Config3 embed_2d(const Config2& c, double psi, const Config3& base);

bool all_finite(const Vec3& v);

namespace detail {

struct FrameRate {
    Vec3 dr, dT, dN, dB;
};

inline FrameRate frame_rate(const Frame3& f, double k, double t) {
    return {f.T, k * f.N, -k * f.T + t * f.B, -t * f.N};
}

inline Frame3 advance(const Frame3& f, const FrameRate& d, double h) {
    return {f.r + h * d.dr, f.T + h * d.dT, f.N + h * d.dN, f.B + h * d.dB};
}

inline void reorthonormalize(Frame3& f) {
    f.T.normalize();
    f.N -= f.N.dot(f.T) * f.T;
    f.N.normalize();
    f.B = f.T.cross(f.N);
}

void check_frame(const Frame3& f0);

}  // namespace detail

/// Fixed-step RK4 walk of the Frenet-Serret equations. The step is shrunk to
/// length / ceil(length / step) so that the last sample lands on s = length.
/// visit(s, frame) is called for every sample including both ends.
template <class Curvature, class Torsion, class Visit>
void frenet_walk(const Frame3& f0, Curvature&& kappa, Torsion&& tau, double length, double step,
                 Visit&& visit) {
    detail::check_frame(f0);
    if (!(step > 0.0) || !std::isfinite(step) || !(length >= 0.0) || !std::isfinite(length))
        throw InvalidInput("frenet_walk: step must be positive and length non-negative");
    Frame3 f = f0;
    visit(0.0, f);
    if (length == 0.0) return;
    const auto n = static_cast<long>(std::ceil(length / step - 1e-12));
    const long steps = n < 1 ? 1 : n;
    const double h = length / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
        const double s = h * static_cast<double>(i);
        const double km = kappa(s + 0.5 * h), tm = tau(s + 0.5 * h);
        const auto k1 = detail::frame_rate(f, kappa(s), tau(s));
        const auto k2 = detail::frame_rate(detail::advance(f, k1, 0.5 * h), km, tm);
        const auto k3 = detail::frame_rate(detail::advance(f, k2, 0.5 * h), km, tm);
        const double se = (i + 1 == steps) ? length : s + h;
        const auto k4 = detail::frame_rate(detail::advance(f, k3, h), kappa(se), tau(se));
        f.r += h / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
        f.T += h / 6.0 * (k1.dT + 2.0 * k2.dT + 2.0 * k3.dT + k4.dT);
        f.N += h / 6.0 * (k1.dN + 2.0 * k2.dN + 2.0 * k3.dN + k4.dN);
        f.B += h / 6.0 * (k1.dB + 2.0 * k2.dB + 2.0 * k3.dB + k4.dB);
        detail::reorthonormalize(f);
        visit(se, f);
    }
}

template <class Curvature, class Torsion>
std::vector<Frame3> frenet_integrate(const Frame3& f0, Curvature&& kappa, Torsion&& tau,
                                     double length, double step) {
    std::vector<Frame3> out;
    frenet_walk(f0, kappa, tau, length, step,
                [&](double, const Frame3& f) { out.push_back(f); });
    return out;
}

}  // namespace reachset
