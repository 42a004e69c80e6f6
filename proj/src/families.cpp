#include "reachset/families.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "reachset/parallel.hpp"

namespace reachset {

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::Dir2D: return "2d-dir";
        case Mode::NoDir2D: return "2d-nodir";
        case Mode::Dir3D: return "3d-dir";
        case Mode::NoDir3D: return "3d-nodir";
    }
    return "?";
}

Mode parse_mode(const std::string& s) {
    if (s == "2d-dir") return Mode::Dir2D;
    if (s == "2d-nodir") return Mode::NoDir2D;
    if (s == "3d-dir") return Mode::Dir3D;
    if (s == "3d-nodir") return Mode::NoDir3D;
    throw InvalidInput("unknown mode '" + s + "'");
}

bool is_spatial(Mode m) { return m == Mode::Dir3D || m == Mode::NoDir3D; }
bool with_direction(Mode m) { return m == Mode::Dir2D || m == Mode::Dir3D; }

int endpoint_dim(Mode m) {
    switch (m) {
        case Mode::NoDir2D: return 2;
        case Mode::Dir2D: return 3;
        case Mode::NoDir3D: return 3;
        case Mode::Dir3D: return 6;
    }
    return 0;
}

HGrid::HGrid() {
    for (int sign : {1, -1})
        for (int i = 0; i < 13; ++i) tau0.push_back(sign * std::pow(10.0, -2.0 + 3.0 * i / 12.0));
}

void CandidateGrid::validate() const {
    if (!(t_f > 0.0) || !std::isfinite(t_f)) throw InvalidInput("t_f must be positive and finite");
    if (!(kappa_max > 0.0) || !std::isfinite(kappa_max))
        throw InvalidInput("kappa_max must be positive and finite");
    if (arc_resolution < 1 || psi_resolution < 1 || twist_resolution < 1)
        throw InvalidGrid("grid resolutions must be >= 1");
    if (!std::isfinite(step) || step < 0.0) throw InvalidInput("step must be finite and >= 0");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::S: return "S";
        case Family::C: return "C";
        case Family::CS: return "CS";
        case Family::SC: return "SC";
        case Family::CC: return "CC";
        case Family::CSC: return "CSC";
        case Family::CCC: return "CCC";
        case Family::H: return "H";
    }
    return "?";
}

std::string candidate_template(const Candidate& c, bool spatial) {
    if (spatial) return family_name(c.family);
    auto t = [](int s) { return s > 0 ? 'L' : 'R'; };
    switch (c.family) {
        case Family::S: return "S";
        case Family::C: return std::string(1, t(c.s1));
        case Family::CS: return std::string{t(c.s1), 'S'};
        case Family::SC: return std::string{'S', t(c.s2)};
        case Family::CC: return std::string{t(c.s1), t(-c.s1)};
        case Family::CSC: return std::string{t(c.s1), 'S', t(c.s2)};
        case Family::CCC: return std::string{t(c.s1), t(-c.s1), t(c.s1)};
        case Family::H: return "H";
    }
    return "?";
}

namespace {

// Length left for the segment that absorbs the budget. Rounding leftovers
// are snapped to zero so that no sliver segment is sampled.
double rest(double t, double used) {
    const double r = t - used;
    return r <= 1e-12 * t ? 0.0 : r;
}

// Planar segment list (C arcs carry signed curvature, axis +z).
std::vector<Segment> planar_segments(const Candidate& c, const CandidateGrid& g) {
    const double k = g.kappa_max, t = g.t_f;
    std::vector<Segment> s;
    auto arc = [&](int sign, double len) { s.push_back(Segment::arc(sign * k, len)); };
    switch (c.family) {
        case Family::S: s.push_back(Segment::straight(t)); break;
        case Family::C: arc(c.s1, t); break;
        case Family::CS:
            arc(c.s1, c.a1);
            s.push_back(Segment::straight(rest(t, c.a1)));
            break;
        case Family::SC:
            s.push_back(Segment::straight(rest(t, c.a2)));
            arc(c.s2, c.a2);
            break;
        case Family::CC:
            arc(c.s1, c.a1);
            arc(-c.s1, rest(t, c.a1));
            break;
        case Family::CSC:
            arc(c.s1, c.a1);
            s.push_back(Segment::straight(rest(t, c.a1 + c.a2)));
            arc(c.s2, c.a2);
            break;
        case Family::CCC:
            arc(c.s1, c.a1);
            arc(-c.s1, c.a2);
            arc(c.s1, rest(t, c.a1 + c.a2));
            break;
        case Family::H: throw InvalidInput("H candidates are spatial only");
    }
    return s;
}

}  // namespace

PlanarPath make_planar_path(const Candidate& c, const CandidateGrid& g, const Config2& start) {
    PlanarPath p;
    p.start = start;
    p.kappa_max = g.kappa_max;
    p.segments = planar_segments(c, g);
    return p;
}

SpatialPath make_spatial_path(const Candidate& c, const CandidateGrid& g, const Config3& base) {
    SpatialPath p;
    p.start = base;
    p.kappa_max = g.kappa_max;
    const Vec3 e0 = base.e.normalized();
    const Vec3 n0 = plane_normal(e0, c.psi);
    const Vec3 axis0 = e0.cross(n0);
    if (c.family == Family::H) {
        p.segments.push_back(Segment::helical(c.helix, axis0, g.t_f));
        return p;
    }
    if (c.family == Family::CSC) {
        const double k = g.kappa_max;
        Segment c1 = Segment::arc(k, c.a1, axis0);
        const Config3 q1 = segment_endpoint(base, c1, k);
        const Vec3 n1 = rotate(axis0.cross(q1.e), q1.e, c.twist);
        p.segments.push_back(c1);
        p.segments.push_back(Segment::straight(rest(g.t_f, c.a1 + c.a2)));
        p.segments.push_back(Segment::arc(k, c.a2, q1.e.cross(n1).normalized()));
        return p;
    }
    p.segments = planar_segments(c, g);
    for (auto& s : p.segments)
        if (s.kind == SegmentKind::C) s.axis = axis0;
    return p;
}

std::vector<double> arc_lengths(const CandidateGrid& g) {
    g.validate();
    const double phi = std::min(kTwoPi, g.kappa_max * g.t_f);
    std::vector<double> out;
    out.reserve(static_cast<size_t>(g.arc_resolution));
    for (int i = 1; i <= g.arc_resolution; ++i)
        out.push_back(phi / g.kappa_max * static_cast<double>(i) / g.arc_resolution);
    return out;
}

namespace {

void push_row(CandidateSet& set, const Candidate& c, const double* f) {
    set.items.push_back(c);
    set.features.insert(set.features.end(), f, f + set.dim);
}

std::array<double, 3> planar_row(const Candidate& c, const CandidateGrid& g) {
    const PlanarPath p = make_planar_path(c, g);
    const Config2 end = path_endpoint(p);
    return {end.x, end.y, heading_change(p)};
}

std::array<double, 6> spatial_row(const Config3& c) {
    return {c.r.x(), c.r.y(), c.r.z(), c.e.x(), c.e.y(), c.e.z()};
}

bool shorter(double a, double t) { return a < t * (1.0 - 1e-12); }

Branch ccc_branch(double middle_angle) {
    return middle_angle >= kPi - 1e-12 ? Branch::MinTime : Branch::MaxTime;
}

bool branch_allows(Branch grid, Branch b) { return grid == Branch::Both || grid == b; }

// Planar templates in stream order. In 3D the sign patterns collapse to the
// left-first variant (psi + pi covers the mirror image).
std::vector<Candidate> planar_templates(const CandidateGrid& g, bool directed, bool spatial) {
    const auto arcs = arc_lengths(g);
    const double t = g.t_f, k = g.kappa_max;
    const std::vector<int> signs = spatial ? std::vector<int>{1} : std::vector<int>{1, -1};
    std::vector<Candidate> out;
    auto add = [&](Family f, int s1, int s2, double a1, double a2) {
        Candidate c;
        c.family = f;
        c.s1 = s1;
        c.s2 = s2;
        c.a1 = a1;
        c.a2 = a2;
        out.push_back(c);
        return &out.back();
    };
    add(Family::S, 1, 1, 0, 0);
    for (int s : signs) add(Family::C, s, s, 0, 0);
    for (int s : signs)
        for (double a : arcs)
            if (shorter(a, t)) add(Family::CS, s, s, a, 0);
    for (int s : signs)
        for (double a : arcs)
            if (shorter(a, t)) add(Family::CC, s, -s, a, 0);
    if (!directed) return out;
    for (int s : signs)
        for (double a : arcs)
            if (shorter(a, t)) add(Family::SC, s, s, 0, a);
    for (int s : signs)
        for (double a1 : arcs)
            for (double a2 : arcs) {
                if (!shorter(a1 + a2, t)) continue;
                const Branch b = ccc_branch(k * a2);
                if (!branch_allows(g.branch, b)) continue;
                add(Family::CCC, s, s, a1, a2)->branch = b;
            }
    if (!spatial) {
        for (int s1 : signs)
            for (int s2 : signs)
                for (double a1 : arcs)
                    for (double a2 : arcs)
                        if (shorter(a1 + a2, t)) add(Family::CSC, s1, s2, a1, a2);
    }
    return out;
}

std::vector<HParams> h_params(const CandidateGrid& g) {
    std::vector<HParams> out;
    for (double z : g.h.zeta) {
        const Branch b = z < 0.0 ? Branch::MaxTime : Branch::MinTime;
        if (!branch_allows(g.branch, b)) continue;
        for (double t0 : g.h.tau0)
            for (double td : g.h.taudot0) out.emplace_back(z, t0, td, b);
    }
    return out;
}

}  // namespace

std::vector<double> candidate_features(const Candidate& c, const CandidateGrid& g, bool spatial,
                                       const Config3& base) {
    if (!spatial) {
        auto r = planar_row(c, g);
        return {r.begin(), r.end()};
    }
    const Config3 end = path_endpoint(make_spatial_path(c, g, base), g.integration_step());
    auto r = spatial_row(end);
    return {r.begin(), r.end()};
}

CandidateSet enumerate_2d(const CandidateGrid& g, bool directed) {
    g.validate();
    CandidateSet set;
    set.spatial = false;
    set.directed = directed;
    set.dim = 3;
    for (const auto& c : planar_templates(g, directed, false)) {
        const auto row = planar_row(c, g);
        push_row(set, c, row.data());
    }
    deduplicate(set);
    return set;
}

CandidateSet enumerate_3d(const CandidateGrid& g, bool directed, const Config3& base) {
    g.validate();
    if (!all_finite(base.r) || !all_finite(base.e) || std::abs(base.e.norm() - 1.0) > 1e-9)
        throw InvalidInput("enumerate_3d: base must have a unit tangent");
    CandidateSet set;
    set.spatial = true;
    set.directed = directed;
    set.dim = 6;
    const Vec3 e0 = base.e;
    std::vector<double> psis;
    for (int j = 0; j < g.psi_resolution; ++j) psis.push_back(kTwoPi * j / g.psi_resolution);

    const auto planar = planar_templates(g, directed, true);
    for (const auto& c0 : planar) {
        const auto pr = planar_row(c0, g);
        const Config2 end{pr[0], pr[1], pr[2]};
        const std::vector<double> once{0.0};
        const auto& angles = c0.family == Family::S ? once : psis;
        for (double psi : angles) {
            Candidate c = c0;
            c.psi = psi;
            const auto row = spatial_row(embed_2d(end, psi, base));
            push_row(set, c, row.data());
        }
    }
    if (directed) {
        const auto arcs = arc_lengths(g);
        for (double a1 : arcs)
            for (double a2 : arcs) {
                if (!shorter(a1 + a2, g.t_f)) continue;
                for (int w = 0; w < g.twist_resolution; ++w) {
                    Candidate c;
                    c.family = Family::CSC;
                    c.a1 = a1;
                    c.a2 = a2;
                    c.twist = kTwoPi * w / g.twist_resolution;
                    const Config3 end0 = path_endpoint(make_spatial_path(c, g, base));
                    for (double psi : psis) {
                        c.psi = psi;
                        Config3 end{base.r + rotate(end0.r - base.r, e0, psi), rotate(end0.e, e0, psi)};
                        const auto row = spatial_row(end);
                        push_row(set, c, row.data());
                    }
                }
            }
        const auto hs = h_params(g);
        std::vector<std::optional<Config3>> ends(hs.size());
        const Frame3 f0 = frame_from(base, 0.0);
        const double step = g.integration_step();
        parallel_for(hs.size(), [&](size_t i) {
            auto res = helical_from_frame(f0, hs[i], g.kappa_max, g.t_f, step, false);
            if (!res.singular_at) ends[i] = res.endpoint;
        });
        for (size_t i = 0; i < hs.size(); ++i) {
            if (!ends[i]) {
                set.dropped_singular += static_cast<long>(psis.size());
                continue;
            }
            Candidate c;
            c.family = Family::H;
            c.helix = hs[i];
            c.branch = hs[i].branch;
            for (double psi : psis) {
                c.psi = psi;
                Config3 end{base.r + rotate(ends[i]->r - base.r, e0, psi), rotate(ends[i]->e, e0, psi)};
                const auto row = spatial_row(end);
                push_row(set, c, row.data());
            }
        }
    }
    deduplicate(set);
    return set;
}

bool is_degeneration(const std::string& a, const std::string& b) {
    size_t j = 0;
    for (char ch : b)
        if (j < a.size() && a[j] == ch) ++j;
    return j == a.size();
}

long deduplicate(CandidateSet& set, double tol) {
    const size_t n = set.size();
    const size_t d = static_cast<size_t>(set.dim);
    std::vector<long long> keys(n * d);
    for (size_t i = 0; i < n * d; ++i) keys[i] = std::llround(set.features[i] / tol);
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    auto less = [&](size_t a, size_t b) {
        for (size_t k = 0; k < d; ++k)
            if (keys[a * d + k] != keys[b * d + k]) return keys[a * d + k] < keys[b * d + k];
        return a < b;
    };
    auto same = [&](size_t a, size_t b) {
        for (size_t k = 0; k < d; ++k)
            if (keys[a * d + k] != keys[b * d + k]) return false;
        return true;
    };
    std::sort(order.begin(), order.end(), less);
    std::vector<char> removed(n, 0);
    for (size_t lo = 0; lo < n;) {
        size_t hi = lo + 1;
        while (hi < n && same(order[lo], order[hi])) ++hi;
        if (hi - lo > 1) {
            std::vector<size_t> kept;
            for (size_t q = lo; q < hi; ++q) {
                const size_t i = order[q];
                const std::string ti = candidate_template(set.items[i], set.spatial);
                bool drop = false;
                for (auto& k : kept) {
                    const std::string tk = candidate_template(set.items[k], set.spatial);
                    if (!is_degeneration(ti, tk) && !is_degeneration(tk, ti)) continue;
                    if (ti.size() < tk.size()) {
                        removed[k] = 1;
                        k = i;
                    } else {
                        removed[i] = 1;
                    }
                    drop = true;
                    break;
                }
                if (!drop) kept.push_back(i);
            }
        }
        lo = hi;
    }
    size_t w = 0;
    for (size_t i = 0; i < n; ++i) {
        if (removed[i]) continue;
        if (w != i) {
            set.items[w] = set.items[i];
            std::copy_n(set.features.begin() + static_cast<long>(i * d), d,
                        set.features.begin() + static_cast<long>(w * d));
        }
        ++w;
    }
    const long dropped = static_cast<long>(n - w);
    set.items.resize(w);
    set.features.resize(w * d);
    set.removed_duplicates += dropped;
    return dropped;
}

}  // namespace reachset
