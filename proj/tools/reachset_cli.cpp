// reachset command-line frontend.
//
//   reachset boundary  [--config run.json] [--mode M] [--t-f T] [--seed S] [--out PREFIX]
//   reachset oracle    ...
//   reachset pmp-check --path path.json ...
//   reachset equiv     ...
//   reachset version
//
// Exit codes: 0 success, 2 invalid configuration or input, 3 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "reachset/config.hpp"
#include "reachset/io.hpp"
#include "reachset/parallel.hpp"
#include "reachset/pmp.hpp"
#include "reachset/reach.hpp"

#ifndef REACHSET_VERSION
#define REACHSET_VERSION "0.0.0"
#endif

using namespace reachset;

namespace {

constexpr int kOk = 0;
constexpr int kBadInput = 2;
constexpr int kFailure = 3;

struct Overrides {
    std::string config;
    std::optional<double> t_f;
    std::optional<uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::string> out;
    std::string path;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config, "JSON run configuration");
    cmd->add_option("--t-f", o.t_f, "time budget t_f");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--mode", o.mode, "2d-dir, 2d-nodir, 3d-dir or 3d-nodir");
    cmd->add_option("--out", o.out, "output path prefix");
}

RunConfig resolve(const Overrides& o) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (o.t_f) c.t_f = *o.t_f;
    if (o.seed) c.seed = *o.seed;
    if (o.mode) c.mode = parse_mode(*o.mode);
    if (o.out) c.out = *o.out;
    if (!o.path.empty()) c.pmp.path_file = o.path;
    c.sync();
    c.validate();
    return c;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_boundary(const RunConfig& c) {
    const BoundaryCloud b = build_boundary(c.mode, c.grid, c.boundary);
    write_boundary(b, c);
    const auto& n = b.counts;
    std::printf("boundary %s t_f=%s: %ld points (%ld candidates, %ld pmp-failed, %ld dominated)\n",
                mode_name(c.mode).c_str(), format_double(c.t_f).c_str(), n.points, n.candidates, n.pmp_failed,
                n.dominated);
    return kOk;
}

int cmd_oracle(const RunConfig& c) {
    const OracleCloud oc =
        mc_oracle(c.mode, c.t_f, c.oracle.n_samples, c.oracle.n_pieces, c.seed, c.kappa_max, c.oracle.model);
    write_oracle(oc, c);
    std::printf("oracle %s t_f=%s: %d samples\n", mode_name(c.mode).c_str(), format_double(c.t_f).c_str(),
                oc.n_samples);
    return kOk;
}

int cmd_pmp_check(const RunConfig& c) {
    if (c.pmp.path_file.empty()) throw InvalidInput("pmp-check needs --path or pmp.path_file");
    const std::string report = pmp_check_json(read_file(c.pmp.path_file), c);
    write_text(c.out + ".pmp.json", report);
    std::fputs(report.c_str(), stdout);
    return kOk;
}

int cmd_equiv(const RunConfig& c) {
    if (c.equiv.directions == 0) throw InvalidInput("equiv needs at least one direction");
    const SupportSweeper sweeper(c.mode, c.grid);
    const auto dirs = random_directions(endpoint_dim(c.mode), c.equiv.directions, c.seed);
    std::vector<EquivRow> rows(dirs.size());
    parallel_for(dirs.size(), [&](size_t k) {
        rows[k].direction.assign(dirs[k].data(), dirs[k].data() + dirs[k].size());
        rows[k].support = sweeper.query(dirs[k], c.equiv.refine);
        rows[k].report = check_candidate(c.mode, rows[k].support.generator, c.grid, dirs[k], c.equiv.tol);
    });
    write_text(c.out + ".equiv.csv", equiv_csv(rows, c));
    size_t pass = 0;
    for (const auto& r : rows) pass += r.report.pass ? 1 : 0;
    std::printf("equiv %s t_f=%s tol=%s: %zu/%zu pass (%.2f%%)\n", mode_name(c.mode).c_str(),
                format_double(c.t_f).c_str(), format_double(c.equiv.tol).c_str(), pass, rows.size(),
                100.0 * static_cast<double>(pass) / static_cast<double>(rows.size()));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reachability-set boundaries of curvature-bounded paths"};
    app.require_subcommand(1);
    Overrides o;
    auto* boundary = app.add_subcommand("boundary", "build and write a boundary cloud");
    auto* oracle = app.add_subcommand("oracle", "sample Monte Carlo endpoints");
    auto* pmp = app.add_subcommand("pmp-check", "check PMP conditions along a path file");
    auto* equiv = app.add_subcommand("equiv", "support sweep with equivalence checks");
    app.add_subcommand("version", "print the version");
    for (auto* cmd : {boundary, oracle, pmp, equiv}) add_common(cmd, o);
    pmp->add_option("--path", o.path, "path file (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kBadInput;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "version") {
        std::printf("reachset %s\n", REACHSET_VERSION);
        return kOk;
    }
    try {
        const RunConfig c = resolve(o);
        if (name == "boundary") return cmd_boundary(c);
        if (name == "oracle") return cmd_oracle(c);
        if (name == "pmp-check") return cmd_pmp_check(c);
        return cmd_equiv(c);
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "reachset: invalid input: %s\n", e.what());
        return kBadInput;
    } catch (const InvalidGrid& e) {
        std::fprintf(stderr, "reachset: invalid grid: %s\n", e.what());
        return kBadInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "reachset: %s\n", e.what());
        return kFailure;
    }
}
