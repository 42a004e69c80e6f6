#include "reachset/geom.hpp"

namespace reachset {

double wrap_angle(double a) {
    if (!std::isfinite(a)) throw InvalidInput("wrap_angle: non-finite angle");
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

bool all_finite(const Vec3& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

Vec3 rotate(const Vec3& v, const Vec3& k, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c));
}

Vec3 reference_normal(const Vec3& e_in) {
    if (!all_finite(e_in) || e_in.norm() == 0.0) throw InvalidInput("reference_normal: bad tangent");
    const Vec3 e = e_in.normalized();
    int best = 0;
    for (int j = 1; j < 3; ++j)
        if (std::abs(e[j]) < std::abs(e[best])) best = j;
    Vec3 a = Vec3::Unit(best);
    a -= a.dot(e) * e;
    return a.normalized();
}

Vec3 plane_normal(const Vec3& e_in, double psi) {
    const Vec3 e = e_in.normalized();
    const Vec3 n = reference_normal(e);
    return (std::cos(psi) * n + std::sin(psi) * e.cross(n)).normalized();
}

Frame3 frame_from(const Config3& c, double psi) {
    if (!all_finite(c.r) || !std::isfinite(psi)) throw InvalidInput("frame_from: non-finite input");
    Frame3 f;
    f.r = c.r;
    f.T = c.e.normalized();
    f.N = plane_normal(f.T, psi);
    f.B = f.T.cross(f.N);
    return f;
}

double frame_defect(const Frame3& f) {
    const double d[] = {std::abs(f.T.norm() - 1.0), std::abs(f.N.norm() - 1.0),
                        std::abs(f.B.norm() - 1.0), std::abs(f.T.dot(f.N)),
                        std::abs(f.T.dot(f.B)),     std::abs(f.N.dot(f.B)),
                        (f.T.cross(f.N) - f.B).norm()};
    double m = 0.0;
    for (double x : d) m = std::max(m, x);
    return std::isfinite(m) ? m : INFINITY;
}

Config3 embed_2d(const Config2& c, double psi, const Config3& base) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y) || !std::isfinite(c.theta) ||
        !std::isfinite(psi) || !all_finite(base.r) || !all_finite(base.e))
        throw InvalidInput("embed_2d: non-finite input");
    const Vec3 e = base.e.normalized();
    const Vec3 n = plane_normal(e, psi);
    Config3 out;
    out.r = base.r + c.x * e + c.y * n;
    out.e = (std::cos(c.theta) * e + std::sin(c.theta) * n).normalized();
    return out;
}

namespace detail {

void check_frame(const Frame3& f0) {
    if (!all_finite(f0.r)) throw InvalidInput("frame with non-finite position");
    if (frame_defect(f0) > 1e-6) throw InvalidFrame("initial frame is not orthonormal right-handed");
}

}  // namespace detail

}  // namespace reachset
