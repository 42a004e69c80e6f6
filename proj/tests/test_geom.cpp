#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "reachset/path.hpp"

using namespace reachset;

namespace {

Frame3 standard_frame() { return {}; }

double frame_error(const Frame3& a, const Frame3& b) {
    return std::max({(a.r - b.r).norm(), (a.T - b.T).norm(), (a.N - b.N).norm(), (a.B - b.B).norm()});
}

Frame3 integrate_helix(double k, double t, double len, double step) {
    auto fs = frenet_integrate(standard_frame(), [k](double) { return k; }, [t](double) { return t; }, len, step);
    return fs.back();
}

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized().toRotationMatrix();
}

}  // namespace

TEST_CASE("wrap_angle maps into (-pi, pi]") {
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(0.5) == doctest::Approx(0.5));
    CHECK(wrap_angle(kTwoPi + 0.25) == doctest::Approx(0.25));
    CHECK(wrap_angle(-kPi - 0.1) == doctest::Approx(kPi - 0.1));
    CHECK_THROWS_AS(wrap_angle(NAN), InvalidInput);
}

TEST_CASE("frenet_integrate: circle and helix oracles") {
    for (double t : {0.0, 1.0, -0.7}) {
        const double len = 2 * kPi;
        const Frame3 got = integrate_helix(1.0, t, len, 1e-3);
        CHECK(frame_error(got, oracle::helix(standard_frame(), 1.0, t, len)) < 1e-6);
    }
    // Circle: r = (sin s, 1 - cos s, 0).
    const Frame3 q = integrate_helix(1.0, 0.0, 1.0, 1e-3);
    CHECK((q.r - Vec3(std::sin(1.0), 1 - std::cos(1.0), 0)).norm() < 1e-9);
}

TEST_CASE("frenet_integrate: samples include both ends and stay orthonormal") {
    auto fs = frenet_integrate(standard_frame(), [](double s) { return 1.0 + 0.5 * std::sin(s); },
                               [](double s) { return std::cos(2 * s); }, 10.0, 1e-3);
    CHECK(fs.size() == 10001);
    double worst = 0;
    for (const auto& f : fs) worst = std::max(worst, frame_defect(f));
    CHECK(worst <= 1e-6);
    auto one = frenet_integrate(standard_frame(), [](double) { return 1.0; }, [](double) { return 0.0; }, 0.0, 1e-3);
    CHECK(one.size() == 1);
}

TEST_CASE("frenet_integrate: fourth-order convergence") {
    const double len = 2 * kPi;
    const Frame3 exact = oracle::helix(standard_frame(), 1.0, 1.0, len);
    double prev = 0;
    for (int i = 0; i < 4; ++i) {
        const double h = 0.1 / std::pow(2.0, i);
        const double err = (integrate_helix(1.0, 1.0, len, h).r - exact.r).norm();
        if (i > 0) CHECK(std::log2(prev / err) >= 3.9);
        prev = err;
    }
}

TEST_CASE("frenet_integrate rejects bad frames") {
    Frame3 f;
    f.N = Vec3(1, 1, 0);
    CHECK_THROWS_AS(frenet_integrate(f, [](double) { return 1.0; }, [](double) { return 0.0; }, 1.0, 1e-3),
                    InvalidFrame);
    Frame3 left;
    left.B = -left.B;
    CHECK_THROWS_AS(frenet_integrate(left, [](double) { return 1.0; }, [](double) { return 0.0; }, 1.0, 1e-3),
                    InvalidFrame);
    CHECK_THROWS_AS(frenet_integrate(Frame3{}, [](double) { return 1.0; }, [](double) { return 0.0; }, 1.0, 0.0),
                    InvalidInput);
}

TEST_CASE("reference normal and embed_2d") {
    CHECK((reference_normal(Vec3::UnitX()) - Vec3::UnitY()).norm() < 1e-15);
    CHECK((plane_normal(Vec3::UnitX(), kPi / 2) - Vec3::UnitZ()).norm() < 1e-15);
    Config3 base;
    const Config3 a = embed_2d({0, 0, 0}, 1.3, base);
    CHECK((a.r - base.r).norm() < 1e-15);
    CHECK((a.e - base.e).norm() < 1e-15);
    const Config3 b = embed_2d({1, 0, 0}, 0.0, base);
    CHECK((b.r - Vec3(1, 0, 0)).norm() < 1e-15);
    CHECK((b.e - Vec3::UnitX()).norm() < 1e-15);
    const Config3 c = embed_2d({0, 1, kPi / 2}, kPi / 2, base);
    CHECK((c.r - Vec3(0, 0, 1)).norm() < 1e-15);
    CHECK((c.e - Vec3::UnitZ()).norm() < 1e-15);
    for (const Vec3& e : {Vec3(0, 0.6, 0.8), Vec3(1, 1, 1).normalized(), Vec3(-1, 0, 0)}) {
        const Vec3 n = reference_normal(e);
        CHECK(std::abs(n.dot(e)) < 1e-15);
        CHECK(std::abs(n.norm() - 1) < 1e-15);
    }
}

TEST_CASE("segment_endpoint 2D closed forms") {
    const Config2 c = segment_endpoint(Config2{}, Segment::arc(1.0, kPi / 2), 1.0);
    CHECK(c.x == doctest::Approx(1.0));
    CHECK(c.y == doctest::Approx(1.0));
    CHECK(c.theta == doctest::Approx(kPi / 2));
    const Config2 r = segment_endpoint(Config2{}, Segment::arc(-2.0, kPi / 2), 2.0);
    CHECK(std::abs(r.x) < 1e-15);
    CHECK(r.y == doctest::Approx(-1.0));
    CHECK(r.theta == doctest::Approx(kPi));  // -pi wraps to +pi
    const Config2 s = segment_endpoint(Config2{1, 2, kPi / 2}, Segment::straight(3.0), 1.0);
    CHECK(s.x == doctest::Approx(1.0));
    CHECK(s.y == doctest::Approx(5.0));
    CHECK_THROWS_AS(segment_endpoint(Config2{}, Segment::arc(0.5, 1.0), 1.0), InvalidInput);
    CHECK_THROWS_AS(segment_endpoint(Config2{NAN, 0, 0}, Segment::straight(1.0), 1.0), InvalidInput);
    CHECK_THROWS_AS(segment_endpoint(Config2{}, Segment::straight(-1.0), 1.0), InvalidInput);
}

TEST_CASE("3D arcs: Rodrigues matches integration and the planar formula") {
    const Config3 base;
    const Vec3 axis = Vec3::UnitZ();
    const Config3 q = segment_endpoint(base, Segment::arc(1.0, 2.0, axis), 1.0);
    const Frame3 f = integrate_helix(1.0, 0.0, 2.0, 1e-3);
    CHECK((q.r - f.r).norm() < 1e-9);
    CHECK((q.e - f.T).norm() < 1e-9);
    for (double psi : {0.0, 0.7, 2.0, 4.5}) {
        const Vec3 n = plane_normal(base.e, psi);
        for (double k : {1.5, -1.5}) {
            const Config3 a = segment_endpoint(base, Segment::arc(k, 0.9, base.e.cross(n)), 1.5);
            const Config2 p = segment_endpoint(Config2{}, Segment::arc(k, 0.9), 1.5);
            const Config3 b = embed_2d(p, psi, base);
            CHECK((a.r - b.r).norm() < 1e-12);
            CHECK((a.e - b.e).norm() < 1e-12);
        }
    }
    CHECK_THROWS_AS(segment_endpoint(base, Segment::arc(1.0, 1.0, Vec3::UnitX()), 1.0), InvalidInput);
}

TEST_CASE("isometry equivariance of segment_endpoint") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Matrix3d R = random_rotation(rng);
        const Vec3 t(u(rng), u(rng), u(rng));
        Config3 c0{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)).normalized()};
        const Vec3 axis = c0.e.cross(Vec3(u(rng), u(rng), u(rng))).normalized();
        std::vector<Segment> segs{Segment::straight(1.3), Segment::arc(2.0, 1.1, axis),
                                  Segment::helical(HParams(0.5, 0.8, 0.3, Branch::MinTime), axis, 0.6)};
        for (const auto& seg : segs) {
            const Config3 a = segment_endpoint(c0, seg, 2.0);
            Config3 m{R * c0.r + t, R * c0.e};
            Segment moved = seg;
            moved.axis = R * seg.axis;
            const Config3 b = segment_endpoint(m, moved, 2.0);
            CHECK((R * a.r + t - b.r).norm() < 1e-9);
            CHECK((R * a.e - b.e).norm() < 1e-9);
            CHECK(std::abs(b.e.norm() - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("path_evaluate walks segments") {
    PlanarPath p;
    p.segments = {Segment::arc(1.0, 1.0), Segment::straight(0.5), Segment::arc(-1.0, 0.7)};
    const Config2 s0 = path_evaluate(p, 0.0);
    CHECK(s0.x == 0.0);
    CHECK(s0.y == 0.0);
    const Config2 j = path_evaluate(p, 1.0);
    const Config2 direct = segment_endpoint(Config2{}, p.segments[0], 1.0);
    CHECK(std::abs(j.x - direct.x) < 1e-12);
    CHECK(std::abs(j.theta - direct.theta) < 1e-12);
    const Config2 end = path_evaluate(p, p.length());
    const Config2 end2 = path_endpoint(p);
    CHECK(std::abs(end.x - end2.x) < 1e-12);
    CHECK(std::abs(end.y - end2.y) < 1e-12);
    CHECK(heading_change(p) == doctest::Approx(0.3));
    CHECK(template_string(p) == "LSR");
    CHECK_THROWS_AS(path_evaluate(p, -0.1), OutOfRange);
    CHECK_THROWS_AS(path_evaluate(p, 2.5), OutOfRange);
}

TEST_CASE("spatial path junction continuity") {
    SpatialPath p;
    const Vec3 ax = Vec3::UnitZ();
    p.segments = {Segment::arc(1.0, 0.8, ax), Segment::helical(HParams(1.0, 0.5, 0.2, Branch::MinTime), ax, 0.9)};
    const double step = 1e-3;
    // Junction: evaluating just before and after the junction converges.
    const Config3 a = path_evaluate(p, 0.8 - 1e-9, step);
    const Config3 b = path_evaluate(p, 0.8 + 1e-9, step);
    CHECK((a.r - b.r).norm() < 1e-8);
    CHECK((a.e - b.e).norm() < 1e-8);
    CHECK(template_string(p) == "CH");
}
