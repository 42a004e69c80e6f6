#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "reachset/families.hpp"
#include "reachset/pmp.hpp"

using namespace reachset;

namespace {

StateVec vec(std::initializer_list<double> v) {
    StateVec p(static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) p[i++] = x;
    return p;
}

PlanarPath planar(std::initializer_list<Segment> segs, double kappa = 1.0) {
    PlanarPath p;
    p.kappa_max = kappa;
    p.segments = segs;
    return p;
}

// State derivative of the 3D model with a world-fixed control.
void model(const Vec3& e, const Vec3& u, Vec3& dr, Vec3& de) {
    dr = e;
    de = u - u.dot(e) * e;
}

// <c_r, r_f> + <c_e, e_f> after flowing (r, e) from time s to t_f along a
// planar unit circle in the xy plane, with u(t) = N(t) of the nominal arc.
double circle_value(Vec3 r, Vec3 e, double s, double tf, const Vec3& cr, const Vec3& ce) {
    const int n = 4000;
    const double h = (tf - s) / n;
    auto u = [](double t) { return Vec3(-std::sin(t), std::cos(t), 0.0); };
    double t = s;
    for (int i = 0; i < n; ++i) {
        Vec3 k1r, k1e, k2r, k2e, k3r, k3e, k4r, k4e;
        model(e, u(t), k1r, k1e);
        model(e + 0.5 * h * k1e, u(t + 0.5 * h), k2r, k2e);
        model(e + 0.5 * h * k2e, u(t + 0.5 * h), k3r, k3e);
        model(e + h * k3e, u(t + h), k4r, k4e);
        r += h / 6 * (k1r + 2 * k2r + 2 * k3r + k4r);
        e += h / 6 * (k1e + 2 * k2e + 2 * k3e + k4e);
        t += h;
    }
    return cr.dot(r) + ce.dot(e);
}

}  // namespace

TEST_CASE("planar costate matches the moment of the terminal costate") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const PlanarPath p = planar({Segment::arc(1.0, 0.8), Segment::straight(0.5), Segment::arc(-1.0, 1.1)});
    for (int k = 0; k < 10; ++k) {
        const StateVec c = vec({u(rng), u(rng), u(rng)});
        const CostateTraj cs = integrate_costate(p, c, 1.0, 0.0, 1e-3);
        const Config2 f = path_endpoint(p);
        for (size_t i = 0; i < cs.size(); i += 97) {
            CHECK(cs.p[i][0] == c[0]);
            CHECK(cs.p[i][1] == c[1]);
            const double want = c[2] + c[1] * (f.x - cs.x[i][0]) - c[0] * (f.y - cs.x[i][1]);
            CHECK(std::abs(cs.p[i][2] - want) <= 1e-10);
        }
    }
}

TEST_CASE("spatial costate along a straight line is linear in time") {
    SpatialPath p;
    p.segments = {Segment::straight(2.0)};
    const StateVec c = vec({0.3, -0.2, 0.9, 0.1, 0.5, -0.4});
    const CostateTraj cs = integrate_costate(p, c, 1.0, 0.0, 1e-2);
    for (size_t i = 0; i < cs.size(); ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(cs.p[i][j] == c[j]);
            CHECK(std::abs(cs.p[i][3 + j] - (c[3 + j] + (2.0 - cs.t[i]) * c[j])) <= 1e-12);
        }
    }
}

TEST_CASE("spatial costate is the sensitivity of the terminal value") {
    SpatialPath p;
    p.segments = {Segment::arc(1.0, 1.5, Vec3::UnitZ())};
    const Vec3 cr(0.4, -0.7, 0.3), ce(-0.2, 0.6, 0.5);
    StateVec c(6);
    c << cr, ce;
    const CostateTraj cs = integrate_costate(p, c, 1.0, 0.0, 1e-3);
    const double d = 1e-6;
    for (size_t i = 0; i + 1 < cs.size(); i += 300) {
        const double s = cs.t[i];
        const Vec3 r(cs.x[i][0], cs.x[i][1], cs.x[i][2]), e(cs.x[i][3], cs.x[i][4], cs.x[i][5]);
        const Vec3 pe(cs.p[i][3], cs.p[i][4], cs.p[i][5]);
        for (const Vec3& dir : {Vec3(0, 0, 1), Vec3(-e.y(), e.x(), 0)}) {
            const double fd =
                (circle_value(r, e + d * dir, s, 1.5, cr, ce) - circle_value(r, e - d * dir, s, 1.5, cr, ce)) /
                (2 * d);
            CHECK(std::abs(pe.dot(dir) - fd) <= 1e-6);
        }
        const double fdr = (circle_value(r + d * Vec3::UnitY(), e, s, 1.5, cr, ce) -
                            circle_value(r - d * Vec3::UnitY(), e, s, 1.5, cr, ce)) /
                           (2 * d);
        CHECK(std::abs(cs.p[i][1] - fdr) <= 1e-6);
    }
}

TEST_CASE("hamiltonian definition") {
    const StateVec p = vec({1.0, 2.0, 3.0}), x = vec({0.0, 0.0, 0.5});
    ControlVec u(1);
    u << -1.0;
    CHECK(hamiltonian(p, x, u, 2.0, -1.0) == doctest::Approx(std::cos(0.5) + 2 * std::sin(0.5) - 3 - 2));
    const StateVec p3 = vec({1, 0, 0, 0, 1, 0}), x3 = vec({0, 0, 0, 1, 0, 0});
    ControlVec u3(3);
    u3 << 0.5, 1.0, 0.0;  // the component along e drops out
    CHECK(hamiltonian(p3, x3, u3, 0.0, 0.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(hamiltonian(p, x3, u3, 0, 0), InvalidInput);
}

TEST_CASE("straight path with an aligned costate passes every check") {
    const PlanarPath p = planar({Segment::straight(1.0)});
    Eigen::VectorXd c(2);
    c << 1.0, 0.0;
    const auto rep = equivalence_check(p, c, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.reach.max_pointwise_gap <= 1e-12);
    CHECK(rep.reach.hamiltonian_drift <= 1e-12);
    CHECK(rep.reach.hamiltonian_level == doctest::Approx(1.0));
    CHECK(rep.problem == ProblemType::MinTime);
    CHECK(rep.time_optimal.max_abs_hamiltonian <= 1e-12);

    SpatialPath s;
    s.segments = {Segment::straight(3.0)};
    Eigen::VectorXd c3(3);
    c3 << 1.0, 0.0, 0.0;
    CHECK(equivalence_check(s, c3, 1e-6).pass);
}

TEST_CASE("a perpendicular costate rejects the straight line") {
    const PlanarPath p = planar({Segment::straight(1.0)});
    Eigen::VectorXd c(2);
    c << 0.0, 1.0;
    const auto rep = equivalence_check(p, c, 1e-6);
    CHECK_FALSE(rep.pass);
    CHECK(rep.reach.max_pointwise_gap == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.reach.gap_time == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("turning toward the heading costate is extremal, turning away is not") {
    Eigen::VectorXd c(3);
    c << 0.0, 0.0, 1.0;
    const auto good = equivalence_check(planar({Segment::arc(1.0, 2.0)}), c, 1e-6);
    CHECK(good.pass);
    const auto bad = equivalence_check(planar({Segment::arc(-1.0, 2.0)}), c, 1e-6);
    CHECK_FALSE(bad.pass);
    CHECK(bad.reach.max_pointwise_gap == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("an LSR extremal passes and a perturbed LSR fails") {
    CandidateGrid g;
    g.t_f = 2.0;
    Candidate c;
    c.family = Family::CSC;
    c.s1 = 1;
    c.s2 = -1;
    c.a1 = 0.5;
    c.a2 = 0.5;
    const PlanarPath best = make_planar_path(c, g);
    // c_r along the straight piece; the heading costate vanishes on it when
    // c_theta is the signed offset of the endpoint from that line.
    const Config2 q = path_evaluate(best, 0.5), f = path_endpoint(best);
    Eigen::VectorXd dir(3);
    dir << std::cos(q.theta), std::sin(q.theta), 0.0;
    dir[2] = dir[0] * (f.y - q.y) - dir[1] * (f.x - q.x);
    CHECK(dir[2] < 0.0);
    auto rep = equivalence_check(best, dir, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.reach.hamiltonian_drift <= 1e-9);
    c.a1 = 0.6;
    rep = equivalence_check(make_planar_path(c, g), dir, 1e-6);
    CHECK_FALSE(rep.pass);
    CHECK(rep.reach.max_pointwise_gap >= 1e-3);
}

TEST_CASE("nontriviality") {
    const PlanarPath p = planar({Segment::straight(1.0)});
    CHECK_THROWS_AS(integrate_costate(p, vec({0, 0, 0}), 0.0, 0.0, 1e-2), NontrivialityViolation);
    CHECK_NOTHROW(integrate_costate(p, vec({0, 0, 0}), 1.0, 0.0, 1e-2));
    CHECK_THROWS_AS(integrate_costate(p, vec({0, 0, 0}), -1.0, 0.0, 1e-2), InvalidInput);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(equivalence_check(p, zero, 1e-6), InvalidInput);
}

TEST_CASE("transversality of the reachability form") {
    Eigen::VectorXd g(3), p(3);
    g << 1, 2, 2;
    p = 2.5 * g;
    auto tr = check_transversality_reach(p, g, 1e-9);
    CHECK(tr.pass);
    CHECK(tr.p0 == doctest::Approx(2.5));
    p << 2, -1, 0;
    tr = check_transversality_reach(p, g, 1e-9);
    CHECK_FALSE(tr.pass);
    CHECK(tr.residual == doctest::Approx(std::sqrt(5.0)));
    tr = check_transversality_reach(-g, g, 1e-9);
    CHECK_FALSE(tr.pass);  // p0 < 0
}

TEST_CASE("decomposition reconstructs the terminal costate") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 500; ++k) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Eigen::VectorXd p(n);
        for (int i = 0; i < n; ++i) p[i] = u(rng);
        std::vector<int> I;
        for (int i = 0; i < n; ++i)
            if (rng() % 2) I.push_back(i);
        if (I.empty()) I.push_back(0);
        if (static_cast<int>(I.size()) == n) I.pop_back();
        if (k % 5 == 0)
            for (int i : I) p[i] = 0.0;
        const auto d = decompose_transversality(p, I, 0.0);
        CHECK((reconstruct(d, I, n) - p).norm() <= 1e-12);
        CHECK(d.degenerate == (k % 5 == 0));
        CHECK(d.p0 >= 0.0);
        if (d.grad_phi) CHECK(std::abs(d.grad_phi->norm() - 1.0) <= 1e-14);
    }
    Eigen::VectorXd p(3);
    p << 1, 2, 3;
    CHECK_THROWS_AS(decompose_transversality(p, {}, 0.0), InvalidInput);
    CHECK_THROWS_AS(decompose_transversality(p, {0, 1, 2}, 0.0), InvalidInput);
    CHECK_THROWS_AS(decompose_transversality(p, {0, 0}, 0.0), InvalidInput);
    CHECK_THROWS_AS(decompose_transversality(p, {5}, 0.0), InvalidInput);
}

TEST_CASE("problem type follows the sign of the Hamiltonian") {
    const PlanarPath p = planar({Segment::straight(1.0)});
    Eigen::VectorXd c(2);
    c << -1.0, 0.0;
    const auto rep = equivalence_check(p, c, 1e-6);
    CHECK(rep.reach.hamiltonian_level == doctest::Approx(-1.0));
    CHECK(rep.problem == ProblemType::MaxTime);
    CHECK(problem_type_name(ProblemType::Abnormal) == "abnormal");
}
