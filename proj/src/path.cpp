#include "reachset/path.hpp"

#include <algorithm>

namespace reachset {

Segment Segment::straight(double length) {
    Segment s;
    s.kind = SegmentKind::S;
    s.length = length;
    return s;
}

Segment Segment::arc(double curvature, double length, const Vec3& axis) {
    Segment s;
    s.kind = SegmentKind::C;
    s.curvature = curvature;
    s.length = length;
    s.axis = axis;
    return s;
}

Segment Segment::helical(const HParams& h, const Vec3& binormal, double length) {
    Segment s;
    s.kind = SegmentKind::H;
    s.helix = h;
    s.axis = binormal;
    s.length = length;
    return s;
}

double default_step(double length) {
    if (!(length > 0.0)) return 1e-3;
    return std::min(1e-3, length / 100.0);
}

void validate_segment(const Segment& seg, double kappa_max, bool spatial) {
    if (!(kappa_max > 0.0) || !std::isfinite(kappa_max))
        throw InvalidInput("kappa_max must be positive and finite");
    if (!std::isfinite(seg.length) || seg.length < 0.0)
        throw InvalidInput("segment length must be finite and non-negative");
    switch (seg.kind) {
        case SegmentKind::S:
            break;
        case SegmentKind::C:
            if (!std::isfinite(seg.curvature) ||
                std::abs(std::abs(seg.curvature) - kappa_max) > 1e-12 * kappa_max)
                throw InvalidInput("C segment curvature must have magnitude kappa_max");
            if (spatial && (!all_finite(seg.axis) || seg.axis.norm() < 1e-12))
                throw InvalidInput("C segment needs a finite nonzero axis");
            break;
        case SegmentKind::H:
            if (!spatial) throw InvalidInput("H segments exist only in 3D");
            if (std::abs(seg.helix.tau0) < kTauMin) throw InvalidInput("H segment: |tau0| too small");
            if (!all_finite(seg.axis) || seg.axis.norm() < 1e-12)
                throw InvalidInput("H segment needs a finite nonzero binormal");
            break;
    }
}

Config2 segment_endpoint(const Config2& c0, const Segment& seg, double kappa_max) {
    validate_segment(seg, kappa_max, false);
    if (!std::isfinite(c0.x) || !std::isfinite(c0.y) || !std::isfinite(c0.theta))
        throw InvalidInput("segment_endpoint: non-finite configuration");
    Config2 c = c0;
    const double L = seg.length;
    if (seg.kind == SegmentKind::S) {
        c.x += L * std::cos(c0.theta);
        c.y += L * std::sin(c0.theta);
    } else {
        const double k = seg.curvature;
        const double th2 = c0.theta + k * L;
        c.x += (std::sin(th2) - std::sin(c0.theta)) / k;
        c.y -= (std::cos(th2) - std::cos(c0.theta)) / k;
        c.theta = th2;
    }
    c.theta = wrap_angle(c.theta);
    return c;
}

Config3 segment_endpoint(const Config3& c0, const Segment& seg, double kappa_max, double step) {
    validate_segment(seg, kappa_max, true);
    if (!all_finite(c0.r) || !all_finite(c0.e) || c0.e.norm() == 0.0)
        throw InvalidInput("segment_endpoint: non-finite configuration");
    const Vec3 e = c0.e.normalized();
    Config3 c;
    switch (seg.kind) {
        case SegmentKind::S:
            c.r = c0.r + seg.length * e;
            c.e = e;
            return c;
        case SegmentKind::C: {
            const Vec3 a = seg.axis.normalized();
            if (std::abs(a.dot(e)) > 1e-6) throw InvalidInput("C axis must be orthogonal to tangent");
            const double k = seg.curvature;
            const Vec3 center = c0.r + a.cross(e) / k;
            const double phi = k * seg.length;
            c.r = center + rotate(c0.r - center, a, phi);
            c.e = rotate(e, a, phi).normalized();
            return c;
        }
        case SegmentKind::H: {
            Vec3 b = seg.axis - seg.axis.dot(e) * e;
            if (std::abs(seg.axis.normalized().dot(e)) > 1e-6)
                throw InvalidInput("H binormal must be orthogonal to tangent");
            b.normalize();
            Frame3 f{c0.r, e, b.cross(e), b};
            const double h = step > 0.0 ? step : default_step(seg.length);
            auto res = helical_from_frame(f, seg.helix, kappa_max, seg.length, h, false);
            if (res.singular_at) throw TorsionSingularity(*res.singular_at);
            return res.endpoint;
        }
    }
    return c;
}

namespace {

template <class Cfg, class Eval>
Cfg walk(const Path<Cfg>& p, double s, Eval&& eval) {
    const double total = p.length();
    if (!std::isfinite(s) || s < 0.0 || s > total + 1e-12 * std::max(1.0, total))
        throw OutOfRange("path_evaluate: arc length outside [0, length]");
    Cfg c = p.start;
    double acc = 0.0;
    for (const auto& seg : p.segments) {
        if (s <= acc + seg.length) {
            Segment part = seg;
            part.length = std::max(0.0, s - acc);
            return eval(c, part, seg.length);
        }
        c = eval(c, seg, seg.length);
        acc += seg.length;
    }
    return c;
}

}  // namespace

Config2 path_evaluate(const PlanarPath& p, double s) {
    return walk(p, s, [&](const Config2& c, const Segment& seg, double) {
        return segment_endpoint(c, seg, p.kappa_max);
    });
}

Config3 path_evaluate(const SpatialPath& p, double s, double step) {
    return walk(p, s, [&](const Config3& c, const Segment& seg, double full) {
        return segment_endpoint(c, seg, p.kappa_max, step > 0.0 ? step : default_step(full));
    });
}

Config2 path_endpoint(const PlanarPath& p) {
    Config2 c = p.start;
    for (const auto& seg : p.segments) c = segment_endpoint(c, seg, p.kappa_max);
    return c;
}

Config3 path_endpoint(const SpatialPath& p, double step) {
    Config3 c = p.start;
    for (const auto& seg : p.segments) c = segment_endpoint(c, seg, p.kappa_max, step);
    return c;
}

double heading_change(const PlanarPath& p) {
    double t = 0.0;
    for (const auto& seg : p.segments)
        if (seg.kind == SegmentKind::C) t += seg.curvature * seg.length;
    return t;
}

std::string template_string(const PlanarPath& p) {
    std::string s;
    for (const auto& seg : p.segments) {
        if (seg.kind == SegmentKind::S) s += 'S';
        else if (seg.kind == SegmentKind::C) s += seg.curvature > 0.0 ? 'L' : 'R';
        else s += 'H';
    }
    return s;
}

std::string template_string(const SpatialPath& p) {
    std::string s;
    for (const auto& seg : p.segments)
        s += seg.kind == SegmentKind::S ? 'S' : seg.kind == SegmentKind::C ? 'C' : 'H';
    return s;
}

}  // namespace reachset
