#pragma once

#include <string>
#include <vector>

#include "reachset/geom.hpp"
#include "reachset/torsion.hpp"

namespace reachset {

enum class SegmentKind { C, S, H };

/// One piece of a path. For C, curvature is signed (|curvature| = kappa_max)
/// and in 3D axis is the rotation axis, orthogonal to the tangent at the
/// segment start. For H, axis is the initial binormal.
struct Segment {
    SegmentKind kind = SegmentKind::S;
    double length = 0.0;
    double curvature = 0.0;
    Vec3 axis = Vec3::UnitZ();
    HParams helix{};

    static Segment straight(double length);
    static Segment arc(double curvature, double length, const Vec3& axis = Vec3::UnitZ());
    static Segment helical(const HParams& h, const Vec3& binormal, double length);
};

template <class Config>
struct Path {
    Config start{};
    std::vector<Segment> segments;
    double kappa_max = 1.0;

    double length() const {
        double t = 0.0;
        for (const auto& s : segments) t += s.length;
        return t;
    }
};

using PlanarPath = Path<Config2>;
using SpatialPath = Path<Config3>;

/// min(1e-3, length / 100), with a floor for zero length.
double default_step(double length);

void validate_segment(const Segment& seg, double kappa_max, bool spatial);

Config2 segment_endpoint(const Config2& c0, const Segment& seg, double kappa_max);
/// step <= 0 selects default_step(seg.length) for H segments.
Config3 segment_endpoint(const Config3& c0, const Segment& seg, double kappa_max,
                         double step = 0.0);

Config2 path_evaluate(const PlanarPath& p, double s);
Config3 path_evaluate(const SpatialPath& p, double s, double step = 0.0);

Config2 path_endpoint(const PlanarPath& p);
Config3 path_endpoint(const SpatialPath& p, double step = 0.0);

/// Total signed turning of a planar path (unwrapped heading change).
double heading_change(const PlanarPath& p);

/// e.g. "LSR", "CSC", "H".
std::string template_string(const PlanarPath& p);
std::string template_string(const SpatialPath& p);

}  // namespace reachset
