#include "reachset/pmp.hpp"

#include <algorithm>

namespace reachset {

namespace {

Vec3 head3(const StateVec& v) { return {v[0], v[1], v[2]}; }
Vec3 tail3(const StateVec& v) { return {v[3], v[4], v[5]}; }

StateVec state6(const Vec3& a, const Vec3& b) {
    StateVec s(6);
    s << a.x(), a.y(), a.z(), b.x(), b.y(), b.z();
    return s;
}

StateVec state3(double a, double b, double c) {
    StateVec s(3);
    s << a, b, c;
    return s;
}

ControlVec control1(double u) {
    ControlVec c(1);
    c << u;
    return c;
}

ControlVec control3(const Vec3& u) {
    ControlVec c(3);
    c << u.x(), u.y(), u.z();
    return c;
}

long segment_steps(double length, double step) {
    return std::max(1L, static_cast<long>(std::ceil(length / step - 1e-12)));
}

void check_step(double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("step must be positive");
}

}  // namespace

double hamiltonian(const StateVec& p, const StateVec& x, const ControlVec& u, double p0, double phi) {
    if (p.size() != x.size()) throw InvalidInput("hamiltonian: costate/state dimension mismatch");
    if (x.size() == 3) {
        if (u.size() != 1) throw InvalidInput("hamiltonian: 2D control must be scalar");
        return p[0] * std::cos(x[2]) + p[1] * std::sin(x[2]) + p[2] * u[0] + p0 * phi;
    }
    if (x.size() == 6) {
        if (u.size() != 3) throw InvalidInput("hamiltonian: 3D control must be a 3-vector");
        const Vec3 e = tail3(x), uu(u[0], u[1], u[2]);
        const Vec3 fe = uu - uu.dot(e) * e;
        return head3(p).dot(e) + tail3(p).dot(fe) + p0 * phi;
    }
    throw InvalidInput("hamiltonian: state must have 3 or 6 entries");
}

// Segments this short relative to the path are stepped over, not sampled: a
// lone sample pair with its own control would sit on a junction.
constexpr double kSliver = 1e-12;
// Largest torsion turn per costate sample on H segments, and the cap on how
// much finer than the requested step that may make the sampling.
constexpr double kCostateTurn = 2e-2;
constexpr long kMaxRefine = 64;

Trajectory sample_trajectory(const PlanarPath& path, double step, bool half_steps) {
    check_step(step);
    if (!(path.length() > 0.0)) throw InvalidInput("sample_trajectory: path has zero length");
    Trajectory tr;
    tr.spatial = false;
    tr.kappa_max = path.kappa_max;
    Config2 c = path.start;
    double theta = path.start.theta, t0 = 0.0;
    for (size_t k = 0; k < path.segments.size(); ++k) {
        const Segment& seg = path.segments[k];
        validate_segment(seg, path.kappa_max, false);
        if (seg.length == 0.0) continue;
        if (seg.length <= kSliver * path.length()) {
            c = segment_endpoint(c, seg, path.kappa_max);
            theta += (seg.kind == SegmentKind::C ? seg.curvature : 0.0) * seg.length;
            t0 += seg.length;
            continue;
        }
        const long n = segment_steps(seg.length, step) * (half_steps ? 2 : 1);
        const double kap = seg.kind == SegmentKind::C ? seg.curvature : 0.0;
        for (long j = 0; j <= n; ++j) {
            const double s = seg.length * static_cast<double>(j) / static_cast<double>(n);
            double x, y;
            if (kap == 0.0) {
                x = c.x + s * std::cos(theta);
                y = c.y + s * std::sin(theta);
            } else {
                x = c.x + (std::sin(theta + kap * s) - std::sin(theta)) / kap;
                y = c.y - (std::cos(theta + kap * s) - std::cos(theta)) / kap;
            }
            tr.t.push_back(t0 + s);
            tr.x.push_back(state3(x, y, theta + kap * s));
            tr.u.push_back(control1(kap));
            tr.segment.push_back(static_cast<int>(k));
        }
        c = segment_endpoint(c, seg, path.kappa_max);
        theta += kap * seg.length;
        t0 += seg.length;
    }
    return tr;
}

Trajectory sample_trajectory(const SpatialPath& path, double step, bool half_steps) {
    check_step(step);
    if (!(path.length() > 0.0)) throw InvalidInput("sample_trajectory: path has zero length");
    Trajectory tr;
    tr.spatial = true;
    tr.kappa_max = path.kappa_max;
    Config3 c = path.start;
    c.e.normalize();
    double t0 = 0.0;
    const double kmax = path.kappa_max;
    for (size_t k = 0; k < path.segments.size(); ++k) {
        const Segment& seg = path.segments[k];
        validate_segment(seg, kmax, true);
        if (seg.length == 0.0) continue;
        if (seg.length <= kSliver * path.length()) {
            c = segment_endpoint(c, seg, kmax);
            t0 += seg.length;
            continue;
        }
        long n = segment_steps(seg.length, step) * (half_steps ? 2 : 1);
        auto push = [&](double s, const Vec3& r, const Vec3& e, const Vec3& u) {
            tr.t.push_back(t0 + s);
            tr.x.push_back(state6(r, e));
            tr.u.push_back(control3(u));
            tr.segment.push_back(static_cast<int>(k));
        };
        if (seg.kind == SegmentKind::S) {
            for (long j = 0; j <= n; ++j) {
                const double s = seg.length * static_cast<double>(j) / static_cast<double>(n);
                push(s, c.r + s * c.e, c.e, Vec3::Zero());
            }
        } else if (seg.kind == SegmentKind::C) {
            const Vec3 a = seg.axis.normalized();
            if (std::abs(a.dot(c.e)) > 1e-6) throw InvalidInput("C axis must be orthogonal to tangent");
            const double kap = seg.curvature;
            const Vec3 center = c.r + a.cross(c.e) / kap;
            for (long j = 0; j <= n; ++j) {
                const double s = seg.length * static_cast<double>(j) / static_cast<double>(n);
                const Vec3 e = rotate(c.e, a, kap * s).normalized();
                push(s, center + rotate(c.r - center, a, kap * s), e, kap * a.cross(e));
            }
        } else {
            Vec3 b = seg.axis - seg.axis.dot(c.e) * c.e;
            if (std::abs(seg.axis.normalized().dot(c.e)) > 1e-6)
                throw InvalidInput("H binormal must be orthogonal to tangent");
            b.normalize();
            const Frame3 f{c.r, c.e, b.cross(c.e), b};
            auto trace = helical_trace(f, seg.helix, kmax, seg.length, seg.length / static_cast<double>(n));
            // The costate RK4 steps between samples, so sample more densely
            // where the torsion spikes.
            double peak = 0.0;
            for (double tau : trace.torsion) peak = std::max(peak, std::abs(tau));
            const long m = std::clamp(static_cast<long>(std::ceil(peak * seg.length / static_cast<double>(n) /
                                                                  kCostateTurn - 1e-9)),
                                      1L, kMaxRefine);
            if (m > 1) {
                n *= m;
                trace = helical_trace(f, seg.helix, kmax, seg.length, seg.length / static_cast<double>(n));
            }
            if (trace.frames.size() != static_cast<size_t>(n + 1))
                throw Error("helical trace returned an unexpected sample count");
            for (long j = 0; j <= n; ++j) {
                const auto& fr = trace.frames[static_cast<size_t>(j)];
                const double s = seg.length * static_cast<double>(j) / static_cast<double>(n);
                push(s, fr.r, fr.T, kmax * fr.N);
            }
        }
        const auto& last = tr.x.back();
        c.r = head3(last);
        c.e = tail3(last).normalized();
        t0 += seg.length;
    }
    return tr;
}

double CostateTraj::hamiltonian_at(size_t i) const {
    return hamiltonian(p[i], x[i], u[i], p0, phi);
}

namespace {

StateVec adjoint_rate(const StateVec& p, const StateVec& x, const ControlVec& u) {
    if (x.size() == 3) return state3(0.0, 0.0, p[0] * std::sin(x[2]) - p[1] * std::cos(x[2]));
    const Vec3 pr = head3(p), pe = tail3(p), e = tail3(x), uu(u[0], u[1], u[2]);
    return state6(Vec3::Zero(), -pr + pe.dot(e) * uu);
}

CostateTraj integrate(const Trajectory& tr, const StateVec& p_tf, double p0, double phi) {
    const int nx = tr.spatial ? 6 : 3;
    if (p_tf.size() != nx) throw InvalidInput("integrate_costate: terminal costate dimension mismatch");
    for (int i = 0; i < nx; ++i)
        if (!std::isfinite(p_tf[i])) throw InvalidInput("integrate_costate: non-finite costate");
    if (!std::isfinite(p0) || !std::isfinite(phi)) throw InvalidInput("integrate_costate: non-finite p0/phi");
    if (p0 < 0.0) throw InvalidInput("integrate_costate: p0 must be >= 0");
    if (p_tf.cwiseAbs().maxCoeff() <= 1e-10 && p0 <= 1e-10)
        throw NontrivialityViolation("costate and p0 vanish simultaneously");

    CostateTraj out;
    out.spatial = tr.spatial;
    out.kappa_max = tr.kappa_max;
    out.p0 = p0;
    out.phi = phi;
    // Walk segments backwards; within a segment the samples are
    // j = 0..2n with full steps at even j.
    std::vector<std::pair<size_t, size_t>> ranges;
    for (size_t i = 0; i < tr.t.size();) {
        size_t j = i;
        while (j + 1 < tr.t.size() && tr.segment[j + 1] == tr.segment[i]) ++j;
        ranges.emplace_back(i, j);
        i = j + 1;
    }
    std::vector<StateVec> pf(tr.t.size());
    StateVec p = p_tf;
    for (auto it = ranges.rbegin(); it != ranges.rend(); ++it) {
        const size_t lo = it->first, hi = it->second;
        pf[hi] = p;
        for (size_t j = hi; j >= lo + 2; j -= 2) {
            const double h = tr.t[j] - tr.t[j - 2];
            const auto k1 = adjoint_rate(p, tr.x[j], tr.u[j]);
            const auto k2 = adjoint_rate(p - 0.5 * h * k1, tr.x[j - 1], tr.u[j - 1]);
            const auto k3 = adjoint_rate(p - 0.5 * h * k2, tr.x[j - 1], tr.u[j - 1]);
            const auto k4 = adjoint_rate(p - h * k3, tr.x[j - 2], tr.u[j - 2]);
            p = p - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            pf[j - 2] = p;
        }
    }
    for (const auto& r : ranges)
        for (size_t j = r.first; j <= r.second; j += 2) {
            out.t.push_back(tr.t[j]);
            out.x.push_back(tr.x[j]);
            out.u.push_back(tr.u[j]);
            out.segment.push_back(tr.segment[j]);
            out.p.push_back(pf[j]);
        }
    return out;
}

}  // namespace

CostateTraj integrate_costate(const PlanarPath& path, const StateVec& p_tf, double p0, double phi,
                              double step) {
    return integrate(sample_trajectory(path, step, true), p_tf, p0, phi);
}

CostateTraj integrate_costate(const SpatialPath& path, const StateVec& p_tf, double p0, double phi,
                              double step) {
    return integrate(sample_trajectory(path, step, true), p_tf, p0, phi);
}

namespace {

bool at_junction(const CostateTraj& c, size_t i) {
    const size_t n = c.size();
    if (i > 0 && c.segment[i - 1] != c.segment[i]) return true;
    if (i + 1 < n && c.segment[i + 1] != c.segment[i]) return true;
    return false;
}

}  // namespace

PmpReport check_pointwise_max(const CostateTraj& cs, int res, double tol) {
    if (cs.size() == 0) throw InvalidInput("check_pointwise_max: empty costate");
    if (res < 2) throw InvalidInput("check_pointwise_max: control grid needs >= 2 points");
    if (!std::isfinite(tol) || tol < 0.0) throw InvalidInput("check_pointwise_max: bad tolerance");
    const double k = cs.kappa_max;
    PmpReport rep;
    rep.tol = tol;
    rep.p0 = cs.p0;
    rep.phi = cs.phi;
    rep.hamiltonian_level = cs.hamiltonian_at(0);
    std::vector<double> ugrid;
    if (!cs.spatial)
        for (int j = 0; j < res; ++j) ugrid.push_back(-k + 2.0 * k * j / (res - 1));
    for (size_t i = 0; i < cs.size(); ++i) {
        const double h = cs.hamiltonian_at(i);
        rep.hamiltonian_drift = std::max(rep.hamiltonian_drift, std::abs(h - rep.hamiltonian_level));
        rep.max_abs_hamiltonian = std::max(rep.max_abs_hamiltonian, std::abs(h));
        if (at_junction(cs, i)) continue;
        double best, used;
        if (!cs.spatial) {
            const double pt = cs.p[i][2];
            best = -INFINITY;
            for (double u : ugrid) best = std::max(best, pt * u);
            used = pt * cs.u[i][0];
        } else {
            const Vec3 e = tail3(cs.x[i]).normalized();
            const Vec3 pe = tail3(cs.p[i]);
            const Vec3 q = pe - pe.dot(e) * e;
            const Vec3 n1 = reference_normal(e), n2 = e.cross(n1);
            best = 0.0;
            for (int j = 0; j < res; ++j) {
                const double a = kTwoPi * j / res;
                const double qd = q.dot(std::cos(a) * n1 + std::sin(a) * n2);
                best = std::max({best, 0.5 * k * qd, k * qd});
            }
            if (q.norm() > 0.0) best = std::max(best, k * q.norm());
            const Vec3 u(cs.u[i][0], cs.u[i][1], cs.u[i][2]);
            used = q.dot(u - u.dot(e) * e);
        }
        const double gap = std::max(0.0, best - used);
        if (gap > rep.max_pointwise_gap) {
            rep.max_pointwise_gap = gap;
            rep.gap_time = cs.t[i];
        }
    }
    rep.pointwise_pass = rep.max_pointwise_gap <= tol;
    rep.constancy_pass = rep.hamiltonian_drift <= tol;
    rep.transversality_pass = true;
    return rep;
}

double check_hamiltonian_constancy(const CostateTraj& cs) {
    if (cs.size() == 0) throw InvalidInput("check_hamiltonian_constancy: empty costate");
    const double h0 = cs.hamiltonian_at(0);
    double d = 0.0;
    for (size_t i = 0; i < cs.size(); ++i) d = std::max(d, std::abs(cs.hamiltonian_at(i) - h0));
    return d;
}

TransversalityResult check_transversality_reach(const Eigen::VectorXd& p_tf,
                                                const Eigen::VectorXd& g, double tol) {
    if (p_tf.size() != g.size()) throw InvalidInput("transversality: dimension mismatch");
    if (!p_tf.allFinite() || !g.allFinite()) throw InvalidInput("transversality: non-finite input");
    const double gg = g.squaredNorm();
    if (gg == 0.0) throw InvalidInput("transversality: gradient must be nonzero");
    TransversalityResult r;
    r.p0 = p_tf.dot(g) / gg;
    r.residual = (p_tf - r.p0 * g).norm();
    r.pass = r.residual <= tol && r.p0 >= -tol;
    return r;
}

Decomposition decompose_transversality(const Eigen::VectorXd& p_tf, const std::vector<int>& I,
                                       double tol) {
    const int n = static_cast<int>(p_tf.size());
    if (I.empty() || static_cast<int>(I.size()) >= n)
        throw InvalidInput("decompose_transversality: index set must be a nonempty proper subset");
    if (!p_tf.allFinite()) throw InvalidInput("decompose_transversality: non-finite costate");
    std::vector<char> in(static_cast<size_t>(n), 0);
    for (int i : I) {
        if (i < 0 || i >= n || in[static_cast<size_t>(i)])
            throw InvalidInput("decompose_transversality: bad or repeated index");
        in[static_cast<size_t>(i)] = 1;
    }
    Decomposition d;
    Eigen::VectorXd part = Eigen::VectorXd::Zero(n);
    d.beta.resize(n - static_cast<int>(I.size()));
    for (int i = 0, b = 0; i < n; ++i) {
        if (in[static_cast<size_t>(i)]) part[i] = p_tf[i];
        else d.beta[b++] = p_tf[i];
    }
    const double m = part.norm();
    if (m <= tol || m == 0.0) {
        d.degenerate = true;
        d.p0 = 0.0;
    } else {
        d.p0 = m;
        d.grad_phi = part / m;
    }
    d.residual = (reconstruct(d, I, n) - p_tf).norm();
    return d;
}

Eigen::VectorXd reconstruct(const Decomposition& d, const std::vector<int>& I, int n) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    std::vector<char> in(static_cast<size_t>(n), 0);
    for (int i : I) in[static_cast<size_t>(i)] = 1;
    if (d.grad_phi) out += d.p0 * *d.grad_phi;
    for (int i = 0, b = 0; i < n; ++i)
        if (!in[static_cast<size_t>(i)]) out[i] = d.beta[b++];
    return out;
}

std::string problem_type_name(ProblemType t) {
    switch (t) {
        case ProblemType::MinTime: return "min-time";
        case ProblemType::MaxTime: return "max-time";
        case ProblemType::Abnormal: return "abnormal";
    }
    return "?";
}

StateVec direction_costate(const Eigen::VectorXd& c, bool spatial) {
    if (!c.allFinite() || c.norm() == 0.0) throw InvalidInput("direction must be finite and nonzero");
    StateVec p = StateVec::Zero(spatial ? 6 : 3);
    const int full = spatial ? 6 : 3, pos = spatial ? 3 : 2;
    if (c.size() != full && c.size() != pos)
        throw InvalidInput("direction has the wrong dimension for this system");
    for (int i = 0; i < c.size(); ++i) p[i] = c[i];
    return p;
}

namespace {

template <class P>
EquivalenceReport equivalence(const P& path, const Eigen::VectorXd& c, double tol, double step,
                              int grid, bool spatial) {
    if (!std::isfinite(tol) || tol < 0.0) throw InvalidInput("equivalence_check: bad tolerance");
    const StateVec p_tf = direction_costate(c, spatial);
    const double h = step > 0.0 ? step : default_step(path.length());
    CostateTraj cs = integrate_costate(path, p_tf, 1.0, 0.0, h);
    EquivalenceReport rep;
    rep.reach = check_pointwise_max(cs, grid, tol);
    const Eigen::VectorXd pend = Eigen::VectorXd(cs.p.back());
    const Eigen::VectorXd g = Eigen::VectorXd(p_tf);
    const auto tr = check_transversality_reach(pend, g, tol);
    rep.reach.transversality_residual = tr.residual;
    rep.reach.transversality_pass = tr.pass;
    rep.reach_pass = rep.reach.pointwise_pass && rep.reach.transversality_pass;

    // Reuse the costate, dropping the reachability cost: p0_B * phi = -H(0).
    const double h0 = rep.reach.hamiltonian_level;
    cs.p0 = std::abs(h0);
    cs.phi = h0 > 0.0 ? -1.0 : (h0 < 0.0 ? 1.0 : -1.0);
    rep.problem = h0 > 0.0 ? ProblemType::MinTime : (h0 < 0.0 ? ProblemType::MaxTime : ProblemType::Abnormal);
    rep.time_optimal = check_pointwise_max(cs, grid, tol);
    rep.time_optimal.transversality_residual = 0.0;
    rep.time_optimal.transversality_pass = true;
    rep.time_optimal_pass = rep.time_optimal.pointwise_pass && rep.time_optimal.max_abs_hamiltonian <= tol;
    rep.pass = rep.reach_pass && rep.time_optimal_pass;
    return rep;
}

}  // namespace

EquivalenceReport equivalence_check(const PlanarPath& path, const Eigen::VectorXd& c, double tol,
                                    double step, int grid) {
    return equivalence(path, c, tol, step, grid, false);
}

EquivalenceReport equivalence_check(const SpatialPath& path, const Eigen::VectorXd& c, double tol,
                                    double step, int grid) {
    return equivalence(path, c, tol, step, grid, true);
}

}  // namespace reachset
