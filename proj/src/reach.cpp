#include "reachset/reach.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include "reachset/optimize.hpp"
#include "reachset/parallel.hpp"
#include "reachset/seeds.hpp"
#include "spatial_index.hpp"

namespace reachset {

std::string control_model_name(ControlModel m) {
    return m == ControlModel::UniformPiecewise ? "uniform-piecewise" : "bang-straight";
}

ControlModel parse_control_model(const std::string& s) {
    if (s == "uniform-piecewise") return ControlModel::UniformPiecewise;
    if (s == "bang-straight") return ControlModel::BangStraight;
    throw InvalidInput("unknown control model '" + s + "'");
}

std::array<double, 2> reduce_axial(const double* r) {
    return {r[0], std::hypot(r[1], r[2])};
}

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform draws built directly on the engine output so that streams are
// identical across standard libraries.
struct Rng {
    std::mt19937_64 eng;
    Rng(uint64_t seed, uint64_t index) : eng(splitmix64(seed ^ splitmix64(index + 1))) {}
    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double exponential() { return -std::log1p(-uniform()); }
};

// Planar arc / straight advance with arbitrary curvature |k| <= kappa_max.
void advance_planar(double& x, double& y, double& th, double k, double len) {
    if (std::abs(k) < 1e-12) {
        x += len * std::cos(th);
        y += len * std::sin(th);
    } else {
        x += (std::sin(th + k * len) - std::sin(th)) / k;
        y -= (std::cos(th + k * len) - std::cos(th)) / k;
        th += k * len;
    }
}

// Spatial advance with curvature magnitude k towards unit normal n.
void advance_spatial(Vec3& r, Vec3& e, const Vec3& n, double k, double len) {
    if (k * len < 1e-14) {
        r += len * e;
        return;
    }
    const Vec3 a = e.cross(n).normalized();
    const Vec3 center = r + n / k;
    r = center + rotate(r - center, a, k * len);
    e = rotate(e, a, k * len).normalized();
}

Vec3 random_normal(Rng& rng, const Vec3& e) {
    const double ang = rng.uniform(0.0, kTwoPi);
    const Vec3 n1 = reference_normal(e);
    return std::cos(ang) * n1 + std::sin(ang) * e.cross(n1);
}

void oracle_sample(Mode mode, double t_f, int pieces, double kmax, ControlModel model, Rng& rng, double* out) {
    std::vector<double> lens;
    if (model == ControlModel::UniformPiecewise) {
        lens.assign(static_cast<size_t>(pieces), t_f / pieces);
    } else {
        const int m = 1 + static_cast<int>(rng.uniform() * pieces) % pieces;
        double sum = 0.0;
        for (int i = 0; i < m; ++i) {
            lens.push_back(rng.exponential());
            sum += lens.back();
        }
        double acc = 0.0;
        for (int i = 0; i + 1 < m; ++i) {
            lens[i] *= t_f / sum;
            acc += lens[i];
        }
        lens.back() = std::max(0.0, t_f - acc);
    }
    if (!is_spatial(mode)) {
        double x = 0, y = 0, th = 0;
        for (double len : lens) {
            double k;
            if (model == ControlModel::UniformPiecewise) {
                k = rng.uniform(-kmax, kmax);
            } else {
                const int pick = static_cast<int>(rng.uniform() * 3.0) % 3;
                k = pick == 0 ? 0.0 : (pick == 1 ? kmax : -kmax);
            }
            advance_planar(x, y, th, k, len);
        }
        out[0] = x;
        out[1] = y;
        if (mode == Mode::Dir2D) out[2] = th;
        return;
    }
    Vec3 r = Vec3::Zero(), e = Vec3::UnitX();
    for (double len : lens) {
        const Vec3 n = random_normal(rng, e);
        double k;
        if (model == ControlModel::UniformPiecewise) {
            k = rng.uniform(0.0, kmax);
        } else {
            k = rng.uniform() < 1.0 / 3.0 ? 0.0 : kmax;
        }
        advance_spatial(r, e, n, k, len);
    }
    for (int i = 0; i < 3; ++i) out[i] = r[i];
    if (mode == Mode::Dir3D)
        for (int i = 0; i < 3; ++i) out[3 + i] = e[i];
}

}  // namespace

OracleCloud mc_oracle(Mode mode, double t_f, int n_samples, int n_pieces, uint64_t seed, double kappa_max,
                      ControlModel model) {
    if (n_samples < 0) throw InvalidInput("mc_oracle: n_samples must be >= 0");
    if (n_pieces < 1) throw InvalidInput("mc_oracle: n_pieces must be >= 1");
    if (!(t_f > 0.0) || !std::isfinite(t_f)) throw InvalidInput("mc_oracle: t_f must be positive");
    if (!(kappa_max > 0.0) || !std::isfinite(kappa_max)) throw InvalidInput("mc_oracle: bad kappa_max");
    OracleCloud oc;
    oc.mode = mode;
    oc.t_f = t_f;
    oc.kappa_max = kappa_max;
    oc.seed = seed;
    oc.n_samples = n_samples;
    oc.n_pieces = n_pieces;
    oc.model = model;
    oc.points.dim = endpoint_dim(mode);
    oc.points.data.assign(static_cast<size_t>(n_samples) * static_cast<size_t>(oc.points.dim), 0.0);
    parallel_for(static_cast<size_t>(n_samples), [&](size_t i) {
        Rng rng(seed, i);
        oracle_sample(mode, t_f, n_pieces, kappa_max, model, rng,
                      oc.points.data.data() + i * static_cast<size_t>(oc.points.dim));
    });
    return oc;
}

// ---------------------------------------------------------------------------
// Support queries

std::vector<double> endpoint_of(Mode mode, const Candidate& c, const CandidateGrid& grid, const Config3& base) {
    auto f = candidate_features(c, grid, is_spatial(mode), base);
    f.resize(static_cast<size_t>(endpoint_dim(mode)));
    return f;
}

namespace {

double dot_row(const Eigen::VectorXd& c, const double* row) {
    double s = 0.0;
    for (int i = 0; i < c.size(); ++i) s += c[i] * row[i];
    return s;
}

struct Encoding {
    Eigen::VectorXd x, scale;
    Domain dom;
};

// Continuous parameters of a candidate within its template.
Encoding encode(const Candidate& c, const CandidateGrid& g, bool spatial) {
    const double t = g.t_f, k = g.kappa_max;
    const double arc_scale = std::min(kTwoPi, k * t) / k / g.arc_resolution;
    std::vector<double> x, lo, hi, sc;
    std::vector<Domain::SumCap> caps;
    auto add = [&](double v, double l, double h, double s) {
        x.push_back(v);
        lo.push_back(l);
        hi.push_back(h);
        sc.push_back(s);
    };
    const double inf = INFINITY;
    switch (c.family) {
        case Family::S:
        case Family::C:
            break;
        case Family::CS:
        case Family::CC:
            add(c.a1, 0.0, t, arc_scale);
            break;
        case Family::SC:
            add(c.a2, 0.0, t, arc_scale);
            break;
        case Family::CSC:
        case Family::CCC: {
            add(c.a1, 0.0, t, arc_scale);
            double l2 = 0.0, h2 = t;
            if (c.family == Family::CCC && g.branch == Branch::MinTime) l2 = std::min(t, kPi / k);
            if (c.family == Family::CCC && g.branch == Branch::MaxTime) h2 = std::min(t, kPi / k);
            add(c.a2, l2, h2, arc_scale);
            caps.push_back({0, 1, t});
            break;
        }
        case Family::H: {
            // zeta may cross zero unless the grid pins a branch.
            const bool minb = c.helix.branch == Branch::MinTime;
            const bool pinned = g.branch != Branch::Both;
            add(c.helix.zeta, pinned && minb ? 0.0 : -inf, pinned && !minb ? 0.0 : inf, 0.25);
            add(std::log(std::abs(c.helix.tau0)), std::log(kTauMin * 10), std::log(1e3), 0.2);
            add(c.helix.taudot0, -inf, inf, 0.25);
            break;
        }
    }
    if (spatial && c.family != Family::S) add(c.psi, -inf, inf, kTwoPi / g.psi_resolution);
    if (spatial && c.family == Family::CSC) add(c.twist, -inf, inf, kTwoPi / g.twist_resolution);
    Encoding e;
    const int n = static_cast<int>(x.size());
    e.x = Eigen::Map<Eigen::VectorXd>(x.data(), n);
    e.scale = Eigen::Map<Eigen::VectorXd>(sc.data(), n);
    e.dom.lo = Eigen::Map<Eigen::VectorXd>(lo.data(), n);
    e.dom.hi = Eigen::Map<Eigen::VectorXd>(hi.data(), n);
    e.dom.caps = caps;
    return e;
}

Candidate decode(const Candidate& base, const Eigen::VectorXd& x, const CandidateGrid& g, bool spatial) {
    Candidate c = base;
    int i = 0;
    switch (c.family) {
        case Family::S:
        case Family::C:
            break;
        case Family::CS:
        case Family::CC:
            c.a1 = x[i++];
            break;
        case Family::SC:
            c.a2 = x[i++];
            break;
        case Family::CSC:
        case Family::CCC:
            c.a1 = x[i++];
            c.a2 = x[i++];
            if (c.family == Family::CCC)
                c.branch = g.kappa_max * c.a2 >= kPi - 1e-12 ? Branch::MinTime : Branch::MaxTime;
            break;
        case Family::H: {
            const double z = x[i++];
            const double t0 = std::copysign(std::exp(x[i++]), c.helix.tau0);
            const double td = x[i++];
            c.helix = g.branch == Branch::Both ? HParams::from_zeta(z, t0, td) : HParams(z, t0, td, c.helix.branch);
            c.branch = c.helix.branch;
            break;
        }
    }
    if (spatial && c.family != Family::S) c.psi = x[i++];
    if (spatial && c.family == Family::CSC) c.twist = x[i++];
    return c;
}

std::string group_key(const Candidate& c) {
    return family_name(c.family) + ":" + std::to_string(c.s1) + ":" + std::to_string(c.s2) + ":" +
           std::to_string(static_cast<int>(c.family == Family::H ? c.helix.branch : Branch::Both));
}

// H extremals meeting p(t_f) = c. The position costate is constant, so
// c_r fixes the launch data up to a positive scale lambda and an angle phi:
// c_r / lambda = (h - 1) T0 + (taudot0 / 2 tau0) N0 - tau0 B0. What remains
// is p_e(t_f) = lambda (m_f / kappa) N_f = projection of c_e.
struct Shot {
    Candidate cand;
    Vec3 residual;
};

// Step multiple for the scan and the first solve phase.
constexpr double kCoarseSteps = 4.0;

std::optional<Shot> shoot(const Eigen::VectorXd& c, double log_lambda, double phi, const CandidateGrid& g,
                          const Config3& base, double step) {
    const Vec3 T0 = base.e.normalized();
    const Vec3 cr(c[0], c[1], c[2]), ce(c[3], c[4], c[5]);
    const Vec3 perp = cr - cr.dot(T0) * T0;
    const double rho = perp.norm();
    if (rho < 1e-12) return std::nullopt;
    const Vec3 uhat = perp / rho, v = T0.cross(uhat);
    const double lam = std::exp(log_lambda);
    const double b = rho / lam * std::cos(phi), gm = rho / lam * std::sin(phi);
    const double tau0 = -gm;
    if (std::abs(tau0) < 10.0 * kTauMin || std::abs(tau0) > 1e3) return std::nullopt;
    const double h = 1.0 + cr.dot(T0) / lam;
    const Vec3 N0 = std::cos(phi) * uhat - std::sin(phi) * v;
    const Vec3 n1 = reference_normal(T0);
    Shot out;
    out.cand.family = Family::H;
    out.cand.psi = std::atan2(N0.dot(T0.cross(n1)), N0.dot(n1));
    try {
        out.cand.helix = HParams::from_zeta(2.0 * h / std::sqrt(std::abs(tau0)), tau0, 2.0 * tau0 * b);
        if (g.branch != Branch::Both && out.cand.helix.branch != g.branch) return std::nullopt;
        out.cand.branch = out.cand.helix.branch;
        const auto tr = helical_trace(frame_from(base, out.cand.psi), out.cand.helix, g.kappa_max, g.t_f, step);
        const Frame3& f = tr.frames.back();
        const double tau_f = tr.torsion.back() / g.kappa_max;
        const double m = std::sqrt(tau0 / tau_f);
        out.residual = lam * m / g.kappa_max * f.N - (ce - ce.dot(f.T) * f.T);
    } catch (const Error&) {
        return std::nullopt;
    }
    if (!out.residual.allFinite()) return std::nullopt;
    return out;
}

// Launch data (log lambda, phi) read off the costate of a path that ends at
// c. A near-extremal twisted CC gives a start next to a spiking helix.
std::optional<Eigen::Vector2d> launch_from(const SpatialPath& path, const Eigen::VectorXd& c, const Config3& base) {
    const Vec3 T0 = base.e.normalized();
    const Vec3 cr(c[0], c[1], c[2]);
    const Vec3 perp = cr - cr.dot(T0) * T0;
    if (perp.norm() < 1e-12) return std::nullopt;
    const Vec3 uhat = perp.normalized(), v = T0.cross(uhat);
    try {
        const CostateTraj ct = integrate_costate(path, direction_costate(c, true), 1.0, 0.0, 1e-3);
        const Vec3 e = ct.x.front().tail<3>(), pe = ct.p.front().tail<3>();
        const Vec3 pp = pe - pe.dot(e) * e;
        if (pp.norm() < 1e-12) return std::nullopt;
        return Eigen::Vector2d(std::log(pp.norm() * path.kappa_max), std::atan2(-pp.dot(v), pp.dot(uhat)));
    } catch (const Error&) {
        return std::nullopt;
    }
}

// Damped Gauss-Newton on the shooting residual, first on a coarse step and
// then polished on the grid step. Close to a multiple of pi tau0 is tiny and
// the residual varies over decades of the offset, so phi is then solved for
// as a log offset from that multiple.
std::optional<Shot> solve_shot(const Eigen::VectorXd& c, double log_lambda, double phi, const CandidateGrid& g,
                               const Config3& base) {
    const double k = std::round(phi / kPi), off = phi - k * kPi;
    const bool logoff = std::abs(off) < 0.05 && off != 0.0;
    const double sg = off < 0 ? -1.0 : 1.0;
    auto angle = [&](double w) { return logoff ? k * kPi + sg * std::exp(w) : w; };
    Eigen::Vector2d z(log_lambda, logoff ? std::log(std::abs(off)) : phi);
    const double scale = std::max(1e-12, c.norm());
    std::optional<Shot> cur;
    for (const auto& [step, target] : {std::pair{kCoarseSteps * g.integration_step(), 1e-6 * scale},
                                       std::pair{g.integration_step(), 1e-11 * scale}}) {
        cur = shoot(c, z[0], angle(z[1]), g, base, step);
        double mu = 1e-3;
        for (int it = 0; it < 40 && cur && mu < 1e8; ++it) {
            if (cur->residual.norm() <= target) break;
            Eigen::Matrix<double, 3, 2> J;
            bool ok = true;
            for (int d = 0; d < 2 && ok; ++d) {
                Eigen::Vector2d zp = z;
                zp[d] += 1e-7;
                const auto sp = shoot(c, zp[0], angle(zp[1]), g, base, step);
                if (sp)
                    J.col(d) = (sp->residual - cur->residual) / 1e-7;
                else
                    ok = false;
            }
            if (!ok) break;
            const Eigen::Matrix2d A = J.transpose() * J;
            const Eigen::Vector2d rhs = -J.transpose() * cur->residual;
            bool moved = false;
            for (; !moved && mu < 1e8; mu *= 10.0) {
                Eigen::Matrix2d M = A;
                M.diagonal() *= 1.0 + mu;
                M.diagonal().array() += 1e-14;
                const Eigen::Vector2d dz = M.ldlt().solve(rhs);
                if (!dz.allFinite()) break;
                const auto sn = shoot(c, z[0] + dz[0], angle(z[1] + dz[1]), g, base, step);
                if (sn && sn->residual.norm() < cur->residual.norm()) {
                    z += dz;
                    cur = sn;
                    moved = true;
                }
            }
            if (!moved) break;
            mu = std::max(1e-12, mu * 3e-3);
        }
        if (!cur || cur->residual.norm() > 1e-3 * scale) return std::nullopt;
    }
    if (cur && cur->residual.norm() <= 1e-8 * scale) return cur;
    return std::nullopt;
}

// Coarse scan of (lambda, phi), then solves from the local minima of the
// scan and from the extra launch points. Angles sit between multiples of pi,
// where tau0 vanishes.
std::vector<Candidate> shoot_helices(const Eigen::VectorXd& c, const CandidateGrid& g, const Config3& base,
                                     const std::vector<Eigen::Vector2d>& extra) {
    std::vector<Candidate> out;
    const double crn = c.head<3>().norm();
    if (c.size() != 6 || crn < 1e-9) return out;
    constexpr int kRows = 13, kCols = 24;
    auto log_lambda = [&](int i) { return std::log(crn) + std::log(10.0) * (-4.0 + 0.5 * i); };
    auto angle = [&](int j) { return kTwoPi * (j + 0.5) / kCols; };
    // The plain residual tends to |c_e| as lambda -> 0 and draws the scan
    // there; the residual over lambda does not.
    std::vector<double> res(kRows * kCols, std::numeric_limits<double>::infinity());
    std::vector<double> rel = res;
    for (int i = 0; i < kRows; ++i)
        for (int j = 0; j < kCols; ++j) {
            const auto s = shoot(c, log_lambda(i), angle(j), g, base, kCoarseSteps * g.integration_step());
            if (!s) continue;
            res[i * kCols + j] = s->residual.norm();
            rel[i * kCols + j] = res[i * kCols + j] / std::exp(log_lambda(i));
        }
    auto minima = [&](const std::vector<double>& m) {
        std::vector<std::pair<double, int>> found;
        for (int i = 0; i < kRows; ++i)
            for (int j = 0; j < kCols; ++j) {
                const double r = m[i * kCols + j];
                if (!std::isfinite(r)) continue;
                bool lowest = true;
                for (int di = -1; di <= 1 && lowest; ++di)
                    for (int dj = -1; dj <= 1; ++dj) {
                        const int ii = i + di, jj = (j + dj + kCols) % kCols;
                        if ((di != 0 || dj != 0) && ii >= 0 && ii < kRows && m[ii * kCols + jj] < r) {
                            lowest = false;
                            break;
                        }
                    }
                if (lowest) found.emplace_back(r, i * kCols + j);
            }
        std::sort(found.begin(), found.end());
        return found;
    };
    const auto by_abs = minima(res), by_rel = minima(rel);
    std::vector<int> cells;
    for (size_t k = 0; k < std::max(by_abs.size(), by_rel.size()) && cells.size() < 8; ++k)
        for (const auto* list : {&by_rel, &by_abs})
            if (k < list->size() && cells.size() < 8 &&
                std::find(cells.begin(), cells.end(), (*list)[k].second) == cells.end())
                cells.push_back((*list)[k].second);
    std::vector<Eigen::Vector2d> starts = extra;
    for (int cell : cells) starts.emplace_back(log_lambda(cell / kCols), angle(cell % kCols));
    for (const auto& z : starts)
        if (const auto s = solve_shot(c, z[0], z[1], g, base)) out.push_back(s->cand);
    return out;
}

}  // namespace

SupportSweeper::SupportSweeper(Mode mode, const CandidateGrid& grid, const Config3& base)
    : mode_(mode), grid_(grid), base_(base) {
    set_ = is_spatial(mode) ? enumerate_3d(grid, with_direction(mode), base) : enumerate_2d(grid, with_direction(mode));
    if (set_.size() == 0) throw InvalidGrid("empty candidate stream");
}

SupportResult SupportSweeper::query(const Eigen::VectorXd& c, bool refine) const {
    const int d = endpoint_dim(mode_);
    if (c.size() != d) throw InvalidInput("support direction has the wrong dimension");
    if (!c.allFinite() || c.norm() == 0.0) throw InvalidInput("support direction must be nonzero");
    const size_t n = set_.size();
    std::vector<double> vals(n);
    for (size_t i = 0; i < n; ++i) vals[i] = dot_row(c, set_.row(i));
    size_t best = 0;
    for (size_t i = 1; i < n; ++i)
        if (vals[i] > vals[best]) best = i;
    SupportResult res;
    res.grid_value = vals[best];
    res.value = vals[best];
    res.generator = set_.items[best];
    res.endpoint.assign(set_.row(best), set_.row(best) + d);
    if (!refine) {
        res.family = candidate_template(res.generator, set_.spatial);
        return res;
    }
    // Leading templates among the top grid values.
    const size_t top = std::min<size_t>(n, 64);
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(top), order.end(),
                      [&](size_t a, size_t b) { return vals[a] != vals[b] ? vals[a] > vals[b] : a < b; });
    std::vector<size_t> starts;
    std::vector<std::string> seen;
    for (size_t q = 0; q < top && starts.size() < 4; ++q) {
        const std::string key = group_key(set_.items[order[q]]);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        starts.push_back(order[q]);
    }
    const bool spatial = set_.spatial;
    for (size_t s : starts) {
        const Candidate& c0 = set_.items[s];
        Encoding enc = encode(c0, grid_, spatial);
        if (enc.x.size() == 0) continue;
        auto f = [&](const Eigen::VectorXd& x) {
            try {
                const Candidate cand = decode(c0, x, grid_, spatial);
                const auto e = endpoint_of(mode_, cand, grid_, base_);
                return dot_row(c, e.data());
            } catch (const Error&) {
                return -std::numeric_limits<double>::infinity();
            }
        };
        MaximizeOptions opt;
        opt.scale = enc.scale;
        // Shooting below finishes spatial helices; a long polish here mostly
        // chases torsion spikes.
        if (mode_ == Mode::Dir3D && c0.family == Family::H) opt.newton_iters = 8;
        const auto r = maximize(f, enc.x, enc.dom, opt);
        if (r.value > res.value) {
            res.value = r.value;
            res.generator = decode(c0, r.x, grid_, spatial);
            res.endpoint = endpoint_of(mode_, res.generator, grid_, base_);
            res.refined = true;
        }
    }
    if (mode_ == Mode::Dir3D) {
        std::vector<Eigen::Vector2d> extra;
        if (res.generator.family != Family::S)
            if (const auto z = launch_from(make_spatial_path(res.generator, grid_, base_), c, base_)) extra.push_back(*z);
        for (const auto& h : shoot_helices(c, grid_, base_, extra)) {
            const auto e = endpoint_of(mode_, h, grid_, base_);
            const double v = dot_row(c, e.data());
            if (v > res.value) {
                res.value = v;
                res.generator = h;
                res.endpoint = e;
                res.refined = true;
            }
        }
    }
    res.family = candidate_template(res.generator, spatial);
    return res;
}

SupportResult support_point(Mode mode, const Eigen::VectorXd& c, const CandidateGrid& grid, bool refine) {
    return SupportSweeper(mode, grid).query(c, refine);
}

EquivalenceReport check_candidate(Mode mode, const Candidate& c, const CandidateGrid& grid, const Eigen::VectorXd& dir,
                                  double tol, const Config3& base) {
    if (is_spatial(mode)) return equivalence_check(make_spatial_path(c, grid, base), dir, tol, grid.integration_step());
    return equivalence_check(make_planar_path(c, grid), dir, tol, grid.integration_step());
}

// ---------------------------------------------------------------------------
// Boundary construction

namespace {

struct Screen {
    bool pass = false;
    StateVec p;
    double gap = INFINITY;
    double drift = INFINITY;
};

bool same_class(const Candidate& a, const Candidate& b) {
    return a.family == b.family && a.s1 == b.s1 && a.s2 == b.s2 && a.a1 == b.a1 && a.a2 == b.a2 &&
           a.twist == b.twist && a.branch == b.branch && a.helix.zeta == b.helix.zeta &&
           a.helix.tau0 == b.helix.tau0 && a.helix.taudot0 == b.helix.taudot0;
}

Screen screen(const Candidate& rep, Mode mode, const CandidateGrid& g, const BoundarySettings& st) {
    Screen out;
    const bool spatial = is_spatial(mode);
    const double tol = rep.family == Family::H ? st.tol_integrated : st.tol_closed;
    const double step = g.integration_step();
    try {
        const auto seeds = costate_seeds(rep, g, spatial, with_direction(mode));
        for (const auto& s0 : seeds) {
            if (s0.norm() == 0.0) continue;
            const StateVec s = s0 / s0.norm();
            CostateTraj cs = spatial ? integrate_costate(make_spatial_path(rep, g), s, 1.0, 0.0, step)
                                     : integrate_costate(make_planar_path(rep, g), s, 1.0, 0.0, step);
            const auto r = check_pointwise_max(cs, spatial ? st.control_grid_3d : st.control_grid_2d, tol);
            if (r.max_pointwise_gap < out.gap) {
                out.gap = r.max_pointwise_gap;
                out.drift = r.hamiltonian_drift;
            }
            if (r.max_pointwise_gap <= tol && r.hamiltonian_drift <= tol) {
                out.pass = true;
                out.p = s;
                out.gap = r.max_pointwise_gap;
                out.drift = r.hamiltonian_drift;
                return out;
            }
        }
    } catch (const TorsionSingularity&) {
    } catch (const NontrivialityViolation&) {
    }
    return out;
}

std::vector<double> normal_from(Mode mode, const StateVec& p, const double* endpoint_row) {
    switch (mode) {
        case Mode::NoDir2D: return {p[0], p[1]};
        case Mode::Dir2D: return {p[0], p[1], p[2]};
        case Mode::NoDir3D: return {p[0], p[1], p[2]};
        case Mode::Dir3D: {
            const Vec3 e(endpoint_row[3], endpoint_row[4], endpoint_row[5]);
            Vec3 pe(p[3], p[4], p[5]);
            pe -= pe.dot(e) * e;
            return {p[0], p[1], p[2], pe.x(), pe.y(), pe.z()};
        }
    }
    return {};
}

StateVec rotate_costate(const StateVec& p, double psi) {
    if (p.size() != 6 || psi == 0.0) return p;
    const Vec3 ax = Vec3::UnitX();
    const Vec3 a = rotate(Vec3(p[0], p[1], p[2]), ax, psi), b = rotate(Vec3(p[3], p[4], p[5]), ax, psi);
    StateVec q(6);
    q << a.x(), a.y(), a.z(), b.x(), b.y(), b.z();
    return q;
}

// Points in the space where dominance is tested: the endpoint space, or
// (axial, radial) coordinates for 3D without direction.
int filter_dim(Mode m) { return m == Mode::NoDir3D ? 2 : endpoint_dim(m); }

void to_filter_space(Mode m, const double* in, double* out) {
    if (m == Mode::NoDir3D) {
        const auto r = reduce_axial(in);
        out[0] = r[0];
        out[1] = r[1];
        return;
    }
    std::copy_n(in, endpoint_dim(m), out);
}

std::vector<double> normal_to_filter_space(Mode m, const double* point, const std::vector<double>& n) {
    if (m != Mode::NoDir3D) return n;
    const Vec3 v(n[0], n[1], n[2]);
    const Vec3 radial(0.0, point[1], point[2]);
    const double rho = radial.norm();
    const double nr = rho > 1e-12 ? v.dot(radial) / rho : std::hypot(v.y(), v.z());
    return {v.x(), nr};
}

void add_cloud(PointCloud& w, const OracleCloud& oc, Mode m, bool mirror) {
    const int d = filter_dim(m);
    std::vector<double> buf(static_cast<size_t>(d));
    for (size_t i = 0; i < oc.points.size(); ++i) {
        if (oc.mode == Mode::NoDir2D && m == Mode::NoDir3D) {
            // A planar path embedded in any plane through the axis.
            buf[0] = oc.points.row(i)[0];
            buf[1] = std::abs(oc.points.row(i)[1]);
        } else {
            to_filter_space(m, oc.points.row(i), buf.data());
        }
        w.push(buf.data());
        if (mirror) {
            buf[1] = -buf[1];
            w.push(buf.data());
        }
    }
}

bool dominated(const detail::NeighborIndex& idx, const PointCloud& w, const double* b, const std::vector<double>& n,
               double radius, double eps, double cone_cos, std::vector<size_t>& scratch) {
    const int d = w.dim;
    double nn = 0.0;
    for (double v : n) nn += v * v;
    nn = std::sqrt(nn);
    if (nn == 0.0) return false;
    idx.in_box(b, radius, scratch);
    for (size_t j : scratch) {
        const double* q = w.row(j);
        double dist2 = 0.0, along = 0.0;
        for (int k = 0; k < d; ++k) {
            const double diff = q[k] - b[k];
            dist2 += diff * diff;
            along += diff * n[static_cast<size_t>(k)];
        }
        const double dist = std::sqrt(dist2);
        if (dist > radius) continue;
        along /= nn;
        if (along > eps && along > cone_cos * dist) return true;
    }
    return false;
}

Eigen::VectorXd random_direction(Rng& rng, int d) {
    Eigen::VectorXd v(d);
    do {
        for (int i = 0; i < d; ++i) {
            // Box-Muller from the portable uniform stream.
            const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
            v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
        }
    } while (v.norm() < 1e-12);
    return v.normalized();
}

}  // namespace

BoundaryCloud build_boundary(Mode mode, const CandidateGrid& grid, const BoundarySettings& st) {
    grid.validate();
    if (st.validation_samples < 0 || st.witness_samples < 0 || st.validation_pieces < 1 ||
        st.witness_max_segments < 1 || st.support_directions < 0)
        throw InvalidInput("build_boundary: invalid validation settings");
    if (!(st.radius_rel > 0.0) || !(st.eps_dom_rel >= 0.0) || !(st.cone_half_angle_deg > 0.0) ||
        !(st.cone_half_angle_deg < 90.0))
        throw InvalidInput("build_boundary: invalid dominance settings");
    BoundaryCloud out;
    out.mode = mode;
    out.t_f = grid.t_f;
    out.kappa_max = grid.kappa_max;
    out.grid = grid;
    out.settings = st;

    const SupportSweeper sweeper(mode, grid);
    const CandidateSet& set = sweeper.candidates();
    const size_t n = set.size();
    out.counts.candidates = static_cast<long>(n);
    out.counts.dropped_singular = set.dropped_singular;
    out.counts.removed_duplicates = set.removed_duplicates;

    // Screening runs once per rotation class (members that differ only in psi).
    std::vector<size_t> class_of(n), reps;
    for (size_t i = 0; i < n; ++i) {
        if (i == 0 || !set.spatial || !same_class(set.items[i - 1], set.items[i])) reps.push_back(i);
        class_of[i] = reps.size() - 1;
    }
    std::vector<Screen> screens(reps.size());
    parallel_for(reps.size(), [&](size_t k) {
        Candidate rep = set.items[reps[k]];
        rep.psi = 0.0;
        screens[k] = screen(rep, mode, grid, st);
    });

    // Witnesses for the dominance test.
    const int fd = filter_dim(mode);
    PointCloud w;
    w.dim = fd;
    // Nodir witnesses are mirrored across the axis: in 3D the reduced point
    // (x, rho) stands for a whole circle, and its far side matters near the
    // axis.
    const bool mirror = !with_direction(mode);
    const uint64_t wseed = splitmix64(st.seed ^ 0x5bd1e995ULL);
    add_cloud(w, mc_oracle(mode, grid.t_f, st.validation_samples, st.validation_pieces, st.seed, grid.kappa_max), mode,
              mirror);
    add_cloud(w, mc_oracle(mode, grid.t_f, st.witness_samples, st.witness_max_segments, wseed, grid.kappa_max,
                           ControlModel::BangStraight),
              mode, mirror);
    if (mode == Mode::NoDir3D) {
        add_cloud(w, mc_oracle(Mode::NoDir2D, grid.t_f, st.validation_samples, st.validation_pieces, st.seed, grid.kappa_max),
                  mode, true);
        add_cloud(w, mc_oracle(Mode::NoDir2D, grid.t_f, st.witness_samples, st.witness_max_segments, wseed,
                               grid.kappa_max, ControlModel::BangStraight),
                  mode, true);
    }
    if (!with_direction(mode)) {
        // Endpoints of the planar families with a free terminal heading are
        // reachable positions too (any plane through the axis in 3D).
        const CandidateSet dense = enumerate_2d(grid, true);
        double buf[2];
        for (size_t i = 0; i < dense.size(); ++i) {
            buf[0] = dense.row(i)[0];
            buf[1] = dense.row(i)[1];
            w.push(buf);
            buf[1] = -buf[1];
            w.push(buf);
        }
    }
    {
        std::vector<double> buf(static_cast<size_t>(fd));
        const int ed = endpoint_dim(mode);
        std::vector<double> e(static_cast<size_t>(ed));
        for (size_t i = 0; i < n; ++i) {
            std::copy_n(set.row(i), ed, e.begin());
            to_filter_space(mode, e.data(), buf.data());
            w.push(buf.data());
            if (mirror) {
                buf[1] = -buf[1];
                w.push(buf.data());
            }
        }
    }
    out.counts.witnesses = static_cast<long>(w.size());
    const auto index = detail::make_index(fd, w.data);
    const double radius = st.radius_rel * grid.t_f;
    const double eps = st.eps_dom_rel * grid.t_f;
    const double cone_cos = std::cos(st.cone_half_angle_deg * kPi / 180.0);

    // Per-candidate decision. In 3D-nodir every member of a rotation class
    // reduces to the same point, so the class representative decides.
    const int ed = endpoint_dim(mode);
    std::vector<char> keep(n, 0);
    std::vector<std::vector<double>> normals(n);
    std::vector<signed char> class_decision(reps.size(), -1);
    auto decide = [&](size_t i, std::vector<size_t>& scratch) -> bool {
        const Screen& s = screens[class_of[i]];
        if (!s.pass) return false;
        const StateVec p = rotate_costate(s.p, set.items[i].psi);
        normals[i] = normal_from(mode, p, set.row(i));
        std::vector<double> fb(static_cast<size_t>(fd));
        to_filter_space(mode, set.row(i), fb.data());
        const auto fn = normal_to_filter_space(mode, set.row(i), normals[i]);
        return !dominated(*index, w, fb.data(), fn, radius, eps, cone_cos, scratch);
    };
    if (mode == Mode::NoDir3D) {
        parallel_for(reps.size(), [&](size_t k) {
            std::vector<size_t> scratch;
            class_decision[k] = decide(reps[k], scratch) ? 1 : 0;
        });
        for (size_t i = 0; i < n; ++i) {
            const Screen& s = screens[class_of[i]];
            if (s.pass) normals[i] = normal_from(mode, rotate_costate(s.p, set.items[i].psi), set.row(i));
            keep[i] = class_decision[class_of[i]] == 1;
        }
    } else {
        parallel_for(n, [&](size_t i) {
            std::vector<size_t> scratch;
            keep[i] = decide(i, scratch) ? 1 : 0;
        });
    }
    for (size_t i = 0; i < n; ++i) {
        const Screen& s = screens[class_of[i]];
        if (!s.pass) {
            ++out.counts.pmp_failed;
            continue;
        }
        if (!keep[i]) {
            ++out.counts.dominated;
            continue;
        }
        BoundaryPoint bp;
        bp.endpoint.assign(set.row(i), set.row(i) + ed);
        bp.normal = normals[i];
        bp.generator = set.items[i];
        bp.family = candidate_template(set.items[i], set.spatial);
        bp.pmp_pass = true;
        bp.gap = s.gap;
        bp.drift = s.drift;
        out.points.push_back(std::move(bp));
    }

    if (with_direction(mode) && st.support_directions > 0) {
        const auto dirs = random_directions(ed, st.support_directions, st.seed ^ 0xa5a5a5a5ULL);
        std::vector<SupportResult> res(dirs.size());
        std::vector<EquivalenceReport> eq(dirs.size());
        parallel_for(dirs.size(), [&](size_t k) {
            res[k] = sweeper.query(dirs[k], st.refine_supports);
            const double tol = res[k].generator.family == Family::H ? st.tol_integrated : st.tol_closed;
            eq[k] = check_candidate(mode, res[k].generator, grid, dirs[k], std::max(tol, st.tol_integrated));
        });
        for (size_t k = 0; k < dirs.size(); ++k) {
            SupportRecord rec;
            rec.direction.assign(dirs[k].data(), dirs[k].data() + ed);
            rec.value = res[k].value;
            rec.family = res[k].family;
            rec.equivalence_pass = eq[k].pass;
            out.supports.push_back(rec);
            if (!eq[k].pass) continue;
            BoundaryPoint bp;
            bp.endpoint = res[k].endpoint;
            bp.normal = rec.direction;
            bp.generator = res[k].generator;
            bp.family = res[k].family;
            bp.pmp_pass = true;
            bp.gap = eq[k].reach.max_pointwise_gap;
            bp.drift = eq[k].reach.hamiltonian_drift;
            bp.support_index = static_cast<int>(k);
            out.points.push_back(std::move(bp));
        }
    }

    if (mode == Mode::NoDir2D && !out.points.empty()) {
        double cx = 0.0, cy = 0.0;
        for (const auto& p : out.points) cx += p.endpoint[0], cy += p.endpoint[1];
        cx /= static_cast<double>(out.points.size());
        cy /= static_cast<double>(out.points.size());
        std::stable_sort(out.points.begin(), out.points.end(), [&](const BoundaryPoint& a, const BoundaryPoint& b) {
            const double aa = std::atan2(a.endpoint[1] - cy, a.endpoint[0] - cx);
            const double ab = std::atan2(b.endpoint[1] - cy, b.endpoint[0] - cx);
            if (aa != ab) return aa < ab;
            return std::hypot(a.endpoint[1] - cy, a.endpoint[0] - cx) < std::hypot(b.endpoint[1] - cy, b.endpoint[0] - cx);
        });
    }
    out.counts.points = static_cast<long>(out.points.size());
    return out;
}

std::vector<Eigen::VectorXd> random_directions(int dim, int n, uint64_t seed) {
    if (dim < 1 || n < 0) throw InvalidInput("random_directions: need dim >= 1 and n >= 0");
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        Rng rng(seed, static_cast<uint64_t>(k));
        out.push_back(random_direction(rng, dim));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation

double containment_check(const BoundaryCloud& b, const OracleCloud& oc, double eps) {
    if (b.mode != oc.mode) throw InvalidInput("containment_check: mode mismatch");
    if (std::abs(b.t_f - oc.t_f) > 1e-12 * std::max(1.0, b.t_f)) throw InvalidInput("containment_check: t_f mismatch");
    if (!(eps >= 0.0)) throw InvalidInput("containment_check: eps must be >= 0");
    const size_t m = oc.points.size();
    if (m == 0) return 0.0;
    std::vector<char> outside(m, 0);
    if (with_direction(b.mode)) {
        if (b.supports.empty()) throw InvalidInput("containment_check: boundary has no support directions");
        parallel_for(m, [&](size_t i) {
            const double* q = oc.points.row(i);
            for (const auto& s : b.supports) {
                double v = 0.0;
                for (size_t k = 0; k < s.direction.size(); ++k) v += s.direction[k] * q[k];
                if (v > s.value + eps) {
                    outside[i] = 1;
                    return;
                }
            }
        });
    } else {
        if (b.points.empty()) return 1.0;
        const Mode mode = b.mode;
        PointCloud pts;
        pts.dim = 2;
        std::vector<std::array<double, 2>> nrm;
        for (const auto& p : b.points) {
            double f[2];
            to_filter_space(mode, p.endpoint.data(), f);
            pts.push(f);
            const auto n = normal_to_filter_space(mode, p.endpoint.data(), p.normal);
            const double len = std::hypot(n[0], n[1]);
            nrm.push_back(len > 0 ? std::array<double, 2>{n[0] / len, n[1] / len} : std::array<double, 2>{0.0, 0.0});
        }
        const auto index = detail::make_index(2, pts.data);
        parallel_for(m, [&](size_t i) {
            double q[2];
            to_filter_space(mode, oc.points.row(i), q);
            const size_t j = index->nearest(q);
            const double* p = pts.row(j);
            const double dx = q[0] - p[0], dy = q[1] - p[1];
            const bool zero = nrm[j][0] == 0.0 && nrm[j][1] == 0.0;
            const double along = zero ? std::hypot(dx, dy) : dx * nrm[j][0] + dy * nrm[j][1];
            outside[i] = along > eps ? 1 : 0;
        });
    }
    const auto count = std::count(outside.begin(), outside.end(), char{1});
    return static_cast<double>(count) / static_cast<double>(m);
}

BoundaryCloud shrink(const BoundaryCloud& b, double factor) {
    BoundaryCloud out = b;
    if (b.points.empty()) return out;
    const size_t d = b.points.front().endpoint.size();
    std::vector<double> c(d, 0.0);
    for (const auto& p : b.points)
        for (size_t k = 0; k < d; ++k) c[k] += p.endpoint[k];
    for (auto& v : c) v /= static_cast<double>(b.points.size());
    for (auto& p : out.points)
        for (size_t k = 0; k < d; ++k) p.endpoint[k] = c[k] + factor * (p.endpoint[k] - c[k]);
    for (auto& s : out.supports) {
        double cc = 0.0;
        for (size_t k = 0; k < d; ++k) cc += s.direction[k] * c[k];
        s.value = cc + factor * (s.value - cc);
    }
    return out;
}

double revolution_hausdorff(const BoundaryCloud& planar, const BoundaryCloud& spatial) {
    if (planar.mode != Mode::NoDir2D || spatial.mode != Mode::NoDir3D)
        throw InvalidInput("revolution_hausdorff expects 2d-nodir and 3d-nodir boundaries");
    if (planar.points.empty() || spatial.points.empty()) return INFINITY;
    PointCloud a, b;
    a.dim = b.dim = 2;
    for (const auto& p : planar.points) {
        const double f[2] = {p.endpoint[0], std::abs(p.endpoint[1])};
        a.push(f);
    }
    for (const auto& p : spatial.points) {
        const auto f = reduce_axial(p.endpoint.data());
        b.push(f.data());
    }
    auto directed = [](const PointCloud& from, const PointCloud& to) {
        const auto idx = detail::make_index(2, to.data);
        double worst = 0.0;
        for (size_t i = 0; i < from.size(); ++i) {
            const double* q = from.row(i);
            const double* p = to.row(idx->nearest(q));
            worst = std::max(worst, std::hypot(q[0] - p[0], q[1] - p[1]));
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace reachset
