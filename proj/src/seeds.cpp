#include "reachset/seeds.hpp"

#include <cmath>

namespace reachset {

namespace {

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

StateVec planar(double px, double py, double pt) {
    StateVec p(3);
    p << px, py, pt;
    return p;
}

struct Junctions {
    std::vector<Config2> at;  // start, every junction, end
};

Junctions junctions(const PlanarPath& p) {
    Junctions j;
    j.at.push_back(p.start);
    for (const auto& s : p.segments) j.at.push_back(segment_endpoint(j.at.back(), s, p.kappa_max));
    return j;
}

// Planar seeds in the frame of the planar path starting at the origin.
std::vector<StateVec> planar_seeds(const Candidate& c, const CandidateGrid& g, bool directed) {
    const PlanarPath path = make_planar_path(c, g);
    const auto J = junctions(path);
    const Config2 f = J.at.back();
    const double thf = heading_change(path);
    std::vector<StateVec> out;
    auto line_seed = [&](double th, const Config2& on_line) {
        const double ex = std::cos(th), ey = std::sin(th);
        for (double lam : {1.0, -1.0})
            out.push_back(planar(lam * ex, lam * ey, -lam * cross2(ex, ey, on_line.x - f.x, on_line.y - f.y)));
    };
    auto chord_seed = [&](const Config2& a, const Config2& b, const Config2& on_line) {
        const double dx = a.x - b.x, dy = a.y - b.y, n = std::hypot(dx, dy);
        if (n < 1e-12) return;
        for (double lam : {1.0, -1.0}) {
            const double px = lam * dx / n, py = lam * dy / n;
            out.push_back(planar(px, py, -cross2(px, py, on_line.x - f.x, on_line.y - f.y)));
        }
    };
    const StateVec tangent = planar(std::cos(thf), std::sin(thf), 0.0);
    switch (c.family) {
        case Family::S:
        case Family::CS:
            out.push_back(tangent);
            break;
        case Family::C:
            out.push_back(tangent);
            if (directed) out.push_back(planar(0.0, 0.0, c.s1));
            break;
        case Family::SC:
            // S is the first segment; heading of the start.
            line_seed(path.start.theta, J.at[0]);
            break;
        case Family::CC:
            chord_seed(J.at[1], f, J.at[1]);
            break;
        case Family::CSC:
            line_seed(path.start.theta + c.s1 * g.kappa_max * c.a1, J.at[1]);
            break;
        case Family::CCC:
            chord_seed(J.at[1], J.at[2], J.at[1]);
            break;
        case Family::H:
            break;
    }
    return out;
}

StateVec spatial(const Vec3& pr, const Vec3& pe) {
    StateVec p(6);
    p << pr.x(), pr.y(), pr.z(), pe.x(), pe.y(), pe.z();
    return p;
}

}  // namespace

Vec3 helix_position_costate(const HParams& h, const Frame3& f0) {
    const double hl = h.zeta * std::sqrt(std::abs(h.tau0)) / 2.0;
    const double alpha = hl - 1.0;
    const double beta = h.taudot0 / (2.0 * h.tau0);
    const double gamma = -h.tau0;
    return alpha * f0.T + beta * f0.N + gamma * f0.B;
}

std::vector<StateVec> costate_seeds(const Candidate& c, const CandidateGrid& g, bool is3d,
                                    bool directed, const Config3& base) {
    if (!is3d) return planar_seeds(c, g, directed);
    std::vector<StateVec> out;
    const double k = g.kappa_max;
    if (c.family == Family::H) {
        const Frame3 f0 = frame_from(base, c.psi);
        const auto res = helical_from_frame(f0, c.helix, k, g.t_f, g.integration_step(), false);
        if (res.singular_at) return out;
        const auto tors = integrate_torsion(c.helix, k * g.t_f, k * g.integration_step());
        const double m = std::sqrt(c.helix.tau0 / tors.back().state.tau);
        out.push_back(spatial(helix_position_costate(c.helix, f0), (m / k) * res.end_frame.N));
        return out;
    }
    const Vec3 e0 = base.e.normalized();
    const Vec3 n0 = plane_normal(e0, c.psi);
    const SpatialPath path = make_spatial_path(c, g, base);
    std::vector<Config3> J{path.start};
    for (const auto& s : path.segments) J.push_back(segment_endpoint(J.back(), s, k));
    const Config3 f = J.back();
    if (c.family == Family::CSC) {
        const Vec3 eS = J[1].e;
        const Vec3 a3 = path.segments[2].axis.normalized();
        const Vec3 nf = a3.cross(f.e);
        const double m = (1.0 - std::cos(k * c.a2)) / k;
        for (double lam : {1.0, -1.0}) out.push_back(spatial(lam * eS, lam * m * nf));
        return out;
    }
    // Planar families: lift (p_x, p_y, p_theta) into the plane of the path.
    const Vec3 axis = e0.cross(n0);
    const Vec3 nf = axis.cross(f.e);
    for (const auto& p2 : planar_seeds(c, g, directed)) {
        // Free terminal heading needs p_theta(t_f) = 0; chord seeds hit it
        // only up to rounding.
        const double pt = directed ? p2[2] : 0.0;
        if (!directed && std::abs(p2[2]) > 1e-9) continue;
        out.push_back(spatial(p2[0] * e0 + p2[1] * n0, pt * nf));
    }
    return out;
}

}  // namespace reachset
