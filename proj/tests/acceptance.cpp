// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "reachset/parallel.hpp"
#include "reachset/reach.hpp"
#include "reachset/torsion.hpp"

using namespace reachset;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Tolerances and budgets.
constexpr double kEquilibriumTol = 1e-8;
constexpr double kRhsTol = 1e-14;
constexpr double kFrenetTol = 1e-6;
constexpr double kMinOrder = 3.9;
constexpr double kMaxOutside = 1e-3;
constexpr double kEpsInRel = 1e-2;
constexpr double kHausdorffRel = 1e-3;
constexpr double kSupportSlack = 1e-3;
constexpr double kEquivTol = 1e-4;
constexpr double kTimeOptimalGap = 1e-4;
constexpr double kTimeOptimalH = 1e-6;
constexpr double kPerturbedGap = 1e-3;
constexpr double kPerturbedFailShare = 0.95;
constexpr double kReconstructTol = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

// budget <= 0: no runtime limit.
void report(int id, bool pass, double secs, double budget, const std::string& detail) {
    const bool ok = pass && (budget <= 0 || secs <= budget);
    failures += ok ? 0 : 1;
    char limit[32] = "no time budget";
    if (budget > 0) std::snprintf(limit, sizeof limit, "budget %.0fs", budget);
    std::printf("%s criterion %d: %s (%.1fs, %s)\n", ok ? "PASS" : "FAIL", id, detail.c_str(), secs, limit);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

void torsion_ode() {
    const auto t0 = Clock::now();
    double worst_eq = 0;
    for (double tau : {1.0, -1.0})
        for (const auto& s : integrate_torsion(HParams(0.0, tau, 0.0, Branch::MinTime), 10.0, 1e-3))
            worst_eq = std::max(worst_eq, std::abs(s.state.tau - tau));
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lg(-2, 1), td(-5, 5), z(-5, 5);
    double worst_rhs = 0;
    for (int i = 0; i < 1000; ++i) {
        const double tau = (rng() % 2 ? -1 : 1) * std::pow(10.0, lg(rng)), taudot = td(rng), zeta = z(rng);
        const double scale = 1.5 * taudot * taudot / std::abs(tau) + 2 * std::pow(std::abs(tau), 3) +
                             2 * std::abs(tau) + std::abs(zeta) * std::pow(std::abs(tau), 1.5);
        const double err = std::abs(torsion_rhs({tau, taudot}, zeta) -
                                    oracle::torsion_second_derivative(tau, taudot, zeta)) /
                           scale;
        worst_rhs = std::max(worst_rhs, err);
    }
    report(1, worst_eq <= kEquilibriumTol && worst_rhs <= kRhsTol, seconds_since(t0), 1.0,
           fmt("equilibrium drift %.2e, rhs relative error %.2e", worst_eq, worst_rhs));
}

Frame3 walk(double k, double t, double len, double h) {
    return frenet_integrate(Frame3{}, [k](double) { return k; }, [t](double) { return t; }, len, h).back();
}

void geometry() {
    const auto t0 = Clock::now();
    const double len = 2.0;
    const double circle = (walk(1, 0, len, 1e-3).r - oracle::helix(Frame3{}, 1, 0, len).r).norm();
    const double helix = (walk(1, 1, len, 1e-3).r - oracle::helix(Frame3{}, 1, 1, len).r).norm();
    const Frame3 exact = oracle::helix(Frame3{}, 1, 1, 2 * kPi);
    double min_order = 1e9, prev = 0;
    for (int i = 0; i < 4; ++i) {
        const double err = (walk(1, 1, 2 * kPi, 0.1 / std::pow(2.0, i)).r - exact.r).norm();
        if (i > 0) min_order = std::min(min_order, std::log2(prev / err));
        prev = err;
    }
    report(2, circle <= kFrenetTol && helix <= kFrenetTol && min_order >= kMinOrder, seconds_since(t0), 5.0,
           fmt("circle %.2e, helix %.2e, min observed order %.3f", circle, helix, min_order));
}

void nodir_boundaries() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (double t_f : {0.5, 1.0, kPi, 2 * kPi}) {
        CandidateGrid g;
        g.t_f = t_f;
        const BoundarySettings s;
        const BoundaryCloud planar = build_boundary(Mode::NoDir2D, g, s);
        const BoundaryCloud spatial = build_boundary(Mode::NoDir3D, g, s);
        const double eps = kEpsInRel * t_f;
        const double out2 = containment_check(planar, mc_oracle(Mode::NoDir2D, t_f, 100000, 20, 101), eps);
        const double out3 = containment_check(spatial, mc_oracle(Mode::NoDir3D, t_f, 100000, 20, 103), eps);
        const double haus = revolution_hausdorff(planar, spatial);
        ok = ok && out2 <= kMaxOutside && out3 <= kMaxOutside && haus <= kHausdorffRel * t_f;
        detail += fmt("t_f=%.4g out2=%.1e out3=%.1e haus=%.1e; ", t_f, out2, out3, haus);
    }
    report(3, ok, seconds_since(t0), 300.0, detail);
}

// Same family, parameters shifted enough to leave the extremal.
Candidate perturb(const Candidate& c, const CandidateGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    auto kick = [&](double size) { return size * (0.5 + 0.5 * std::abs(u(rng))) * (u(rng) < 0 ? -1 : 1); };
    Candidate p = c;
    const double t = g.t_f;
    switch (c.family) {
        case Family::H: {
            p.psi += kick(0.2);
            const double tau0 = c.helix.tau0 * std::exp(kick(0.2));
            p.helix = HParams::from_zeta(c.helix.zeta + kick(0.3), tau0, c.helix.taudot0 + kick(0.2));
            p.branch = p.helix.branch;
            break;
        }
        case Family::S:
            p.family = Family::CS;
            p.a1 = 0.1 * t;
            break;
        case Family::C:
            p.psi += kick(0.2);
            p.family = Family::CS;
            p.a1 = 0.8 * t;
            break;
        default:
            p.psi += kick(0.2);
            p.twist += kick(0.3);
            p.a1 = std::clamp(c.a1 * (1 + kick(0.1)), 0.0, t);
            break;
    }
    return p;
}

void dir3d_supports() {
    CandidateGrid g;
    g.t_f = 1.0;
    const auto t0 = Clock::now();
    OracleCloud uni = mc_oracle(Mode::Dir3D, g.t_f, 100000, 20, 201);
    const OracleCloud bang = mc_oracle(Mode::Dir3D, g.t_f, 100000, 20, 202, 1.0, ControlModel::BangStraight);
    uni.points.data.insert(uni.points.data.end(), bang.points.data.begin(), bang.points.data.end());
    const SupportSweeper sweeper(Mode::Dir3D, g);
    const auto dirs = random_directions(6, 200, 2025);
    std::vector<SupportResult> win(dirs.size());
    std::vector<EquivalenceReport> eq(dirs.size());
    std::vector<double> emp(dirs.size());
    parallel_for(dirs.size(), [&](size_t k) {
        win[k] = sweeper.query(dirs[k]);
        eq[k] = check_candidate(Mode::Dir3D, win[k].generator, g, dirs[k], kEquivTol);
        double best = -1e300;
        for (size_t i = 0; i < uni.points.size(); ++i) {
            double v = 0;
            for (int j = 0; j < 6; ++j) v += dirs[k][j] * uni.points.row(i)[j];
            best = std::max(best, v);
        }
        emp[k] = best;
    });
    int dominate = 0, equiv = 0;
    double worst_margin = 1e300;
    for (size_t k = 0; k < dirs.size(); ++k) {
        dominate += win[k].value >= emp[k] - kSupportSlack;
        equiv += eq[k].pass;
        worst_margin = std::min(worst_margin, win[k].value - emp[k]);
    }
    const int n = static_cast<int>(dirs.size());
    report(4, dominate == n && equiv == n, seconds_since(t0), 600.0,
           fmt("support >= oracle - 1e-3 in %g/%g, equivalence at 1e-4 in %g/%g", dominate, n, equiv, n) +
               fmt(", worst support margin %.2e", worst_margin));

    const auto t1 = Clock::now();
    int time_ok = 0;
    double worst_gap = 0, worst_h = 0;
    for (size_t k = 0; k < dirs.size(); ++k) {
        const auto& r = eq[k].time_optimal;
        worst_gap = std::max(worst_gap, r.max_pointwise_gap);
        worst_h = std::max(worst_h, r.max_abs_hamiltonian);
        time_ok += r.max_pointwise_gap <= kTimeOptimalGap && r.max_abs_hamiltonian <= kTimeOptimalH;
    }
    std::mt19937_64 rng(99);
    std::vector<Candidate> pert(100);
    for (size_t k = 0; k < pert.size(); ++k) pert[k] = perturb(win[k].generator, g, rng);
    std::vector<double> gaps(pert.size());
    parallel_for(pert.size(), [&](size_t k) {
        try {
            gaps[k] = check_candidate(Mode::Dir3D, pert[k], g, dirs[k], kEquivTol).reach.max_pointwise_gap;
        } catch (const Error&) {
            gaps[k] = -1.0;  // a perturbation that is not a path does not count as a failure
        }
    });
    int failed = 0;
    for (double gp : gaps) failed += gp >= kPerturbedGap;
    const double share = failed / static_cast<double>(pert.size());
    report(5, time_ok == n && share >= kPerturbedFailShare, seconds_since(t1), 120.0,
           fmt("time-optimal form holds for %g/%g (worst gap %.2e, worst |H + p0 phi| %.2e)", time_ok, n, worst_gap,
               worst_h) +
               fmt(", perturbed controls fail in %.0f%%", 100 * share));
}

void decomposition() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-10, 10);
    double worst = 0;
    int degenerate = 0;
    for (int k = 0; k < 1000; ++k) {
        const int n = 2 + static_cast<int>(rng() % 7);
        Eigen::VectorXd p(n);
        for (int i = 0; i < n; ++i) p[i] = u(rng);
        std::vector<int> I;
        for (int i = 0; i < n; ++i)
            if (rng() % 2) I.push_back(i);
        if (I.empty()) I.push_back(static_cast<int>(rng() % n));
        if (static_cast<int>(I.size()) == n) I.erase(I.begin() + static_cast<long>(rng() % I.size()));
        switch (k % 8) {
            case 0:  // costate vanishes on I
                for (int i : I) p[i] = 0.0;
                break;
            case 1:  // costate vanishes everywhere
                p.setZero();
                break;
            case 2:  // tiny entries on I
                for (int i : I) p[i] *= 1e-300;
                break;
            default: break;
        }
        const auto d = decompose_transversality(p, I, 0.0);
        degenerate += d.degenerate;
        worst = std::max(worst, (reconstruct(d, I, n) - p).norm() / std::max(1.0, p.norm()));
    }
    report(6, worst <= kReconstructTol, seconds_since(t0), 1.0,
           fmt("worst relative reconstruction error %.2e over 1000 draws (%g degenerate)", worst, degenerate));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism() {
#ifdef REACHSET_CLI_PATH
    const auto t0 = Clock::now();
    const fs::path root = fs::temp_directory_path() / ("reachset_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(root);
    struct Run {
        std::string name, command, json;
    };
    const std::vector<Run> runs = {
        {"b2", "boundary", R"({"mode": "2d-nodir", "t_f": 3.0, "seed": 5})"},
        {"b3", "boundary", R"({"mode": "3d-nodir", "t_f": 1.0, "seed": 5})"},
        {"bd", "boundary", R"({"mode": "2d-dir", "t_f": 2.0, "seed": 5})"},
        {"o3", "oracle", R"({"mode": "3d-dir", "t_f": 2.0, "seed": 5})"},
    };
    bool ok = true;
    int compared = 0;
    for (const auto& r : runs) {
        std::ofstream(root / (r.name + ".json")) << r.json;
        std::vector<std::vector<std::string>> outputs;
        for (const char* threads : {"1", "8", "1", "8"}) {
            const fs::path dir = root / (r.name + "_" + threads + "_" + std::to_string(outputs.size()));
            fs::create_directories(dir);
            const std::string cmd = "cd '" + dir.string() + "' && REACHSET_THREADS=" + threads + " '" +
                                    REACHSET_CLI_PATH + "' " + r.command + " -c ../" + r.name +
                                    ".json --out run > log.txt 2>&1";
            if (std::system(cmd.c_str()) != 0) ok = false;
            std::vector<std::string> files;
            for (const char* ext : {".csv", ".json"})
                files.push_back(slurp(dir / ("run." + r.command + ext)));
            outputs.push_back(files);
        }
        for (size_t i = 1; i < outputs.size(); ++i) {
            ok = ok && outputs[i] == outputs[0] && !outputs[0][0].empty();
            ++compared;
        }
    }
    fs::remove_all(root);
    report(7, ok, seconds_since(t0), 0.0,
           fmt("%g run pairs byte-identical across REACHSET_THREADS=1 and 8", compared));
#else
    report(7, false, 0.0, 1.0, "reachset CLI not built");
#endif
}

}  // namespace

int main() {
    torsion_ode();
    geometry();
    nodir_boundaries();
    dir3d_supports();
    decomposition();
    determinism();
    std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
