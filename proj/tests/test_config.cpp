#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <clocale>
#include <cmath>
#include <random>
#include <sstream>

#include "reachset/config.hpp"
#include "reachset/io.hpp"

using namespace reachset;

TEST_CASE("defaults round trip") {
    const RunConfig c;
    const RunConfig d = parse_config(to_json(c));
    CHECK(c == d);
    CHECK(to_json(d) == to_json(c));
    CHECK(config_hash(c).size() == 16);
}

TEST_CASE("random configs round trip") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.01, 7.0);
    for (int k = 0; k < 50; ++k) {
        RunConfig c;
        c.mode = static_cast<Mode>(k % 4);
        c.t_f = u(rng);
        c.kappa_max = u(rng);
        c.seed = rng();
        c.eps_in_rel = u(rng) * 1e-3;
        c.grid.arc_resolution = 1 + static_cast<int>(rng() % 100);
        c.grid.branch = static_cast<Branch>(k % 3);
        c.grid.h.zeta = {u(rng), -u(rng)};
        c.grid.h.taudot0 = {};
        c.oracle.model = k % 2 ? ControlModel::BangStraight : ControlModel::UniformPiecewise;
        c.boundary.tol_closed = u(rng) * 1e-7;
        c.equiv.refine = k % 3 == 0;
        c.pmp.path_file = "p" + std::to_string(k) + ".json";
        c.out = "o/x" + std::to_string(k);
        c.sync();
        const RunConfig d = parse_config(to_json(c));
        CHECK(c == d);
        CHECK(config_hash(c) == config_hash(d));
    }
}

TEST_CASE("hash separates configs") {
    RunConfig a, b;
    b.seed = 2;
    b.sync();
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.out = "elsewhere/run";
    CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("partial documents fill defaults") {
    const RunConfig c = parse_config(R"({"mode": "3d-dir", "t_f": 2.5, "oracle": {"n_samples": 10}})");
    CHECK(c.mode == Mode::Dir3D);
    CHECK(c.t_f == 2.5);
    CHECK(c.grid.t_f == 2.5);
    CHECK(c.oracle.n_samples == 10);
    CHECK(c.oracle.n_pieces == 20);
}

TEST_CASE("strict parsing") {
    CHECK_THROWS_AS(parse_config(R"({"t_f": 1, "tf": 2})"), InvalidInput);
    CHECK_THROWS_AS(parse_config(R"({"grid": {"arc_res": 3}})"), InvalidInput);
    CHECK_THROWS_AS(parse_config(R"({"grid": {"h": {"zeta": [1, "a"]}}})"), InvalidInput);
    CHECK_THROWS_AS(parse_config(R"({"t_f": "1"})"), InvalidInput);
    CHECK_THROWS_AS(parse_config(R"({"oracle": {"n_samples": 1.5}})"), InvalidInput);
    CHECK_THROWS_AS(parse_config(R"({"mode": "5d"})"), InvalidInput);
    CHECK_THROWS_AS(parse_config("[1, 2]"), InvalidInput);
    CHECK_THROWS_AS(parse_config("{not json"), InvalidInput);
    CHECK_THROWS_AS(load_config("/nonexistent/run.json"), InvalidInput);
}

TEST_CASE("validation") {
    RunConfig c;
    c.t_f = 0.0;
    c.sync();
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c = RunConfig{};
    c.grid.arc_resolution = 0;
    CHECK_THROWS_AS(c.validate(), InvalidGrid);
    c = RunConfig{};
    c.oracle.n_samples = -3;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c = RunConfig{};
    c.equiv.tol = -1;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    CHECK_NOTHROW(RunConfig{}.validate());
}

TEST_CASE("floats are written with 17 digits and a dot") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        CHECK(std::stod(format_double(v)) == v);
    }
    if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") != nullptr) {
        CHECK(format_double(0.5) == "0.5");
        std::setlocale(LC_NUMERIC, "C");
    }
}

TEST_CASE("oracle csv carries hash and seed") {
    RunConfig c;
    c.mode = Mode::NoDir2D;
    c.seed = 7;
    c.oracle.n_samples = 10;
    c.sync();
    const OracleCloud oc = mc_oracle(c.mode, c.t_f, 10, 20, c.seed);
    const std::string csv = oracle_csv(oc, c);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line.find("config_hash=" + config_hash(c)) != std::string::npos);
    CHECK(line.find("seed=7") != std::string::npos);
    int rows = 0;
    std::getline(in, line);  // column header
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 10);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(oracle_metadata(oc, c).find(config_hash(c)) != std::string::npos);
}

TEST_CASE("path files") {
    const PathSpec s = parse_path_spec(R"({
        "start": {"x": 0, "y": 0, "theta": 0}, "kappa_max": 1,
        "segments": [{"kind": "C", "curvature": 1, "length": 0.5}, {"kind": "S", "length": 1}],
        "costate": [1, 0, 0]})");
    CHECK_FALSE(s.spatial);
    CHECK(s.planar.segments.size() == 2);
    CHECK(s.p0 == 1.0);
    const PathSpec h = parse_path_spec(R"({
        "start": {"r": [0, 0, 0], "e": [1, 0, 0]}, "kappa_max": 1,
        "segments": [{"kind": "H", "length": 0.5, "zeta": 1, "tau0": 0.5, "taudot0": 0, "binormal": [0, 0, 1]}],
        "costate": [1, 0, 0, 0, 0, 0], "p0": 0.5, "phi": -1})");
    CHECK(h.spatial);
    CHECK(h.phi == -1.0);
    CHECK_THROWS_AS(parse_path_spec(R"({"segments": []})"), InvalidInput);
    CHECK_THROWS_AS(parse_path_spec(R"({"start": {"x": 0, "y": 0, "theta": 0}, "kappa_max": 1, "segments": [{"kind": "Q", "length": 1}],
        "costate": [1, 0, 0]})"),
                    InvalidInput);
    CHECK_THROWS_AS(parse_path_spec(R"({"start": {"x": 0, "y": 0, "theta": 0}, "kappa_max": 1, "segments": [{"kind": "S", "length": 1}],
        "costate": [1, 0]})"),
                    InvalidInput);
    CHECK_THROWS_AS(parse_path_spec(R"({"start": {"x": 0, "y": 0, "theta": 0}, "kappa_max": 1, "segments": [{"kind": "S", "length": 1}],
        "costate": [1, 0, 0], "colour": 1})"),
                    InvalidInput);
}

TEST_CASE("branch names") {
    for (Branch b : {Branch::MinTime, Branch::MaxTime, Branch::Both}) CHECK(parse_branch(branch_name(b)) == b);
    CHECK_THROWS_AS(parse_branch("fast"), InvalidInput);
}
