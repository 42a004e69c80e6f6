#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reachset/families.hpp"
#include "reachset/reach.hpp"

namespace reachset {

struct OracleSettings {
    int n_samples = 100000;
    int n_pieces = 20;
    ControlModel model = ControlModel::UniformPiecewise;
};

struct EquivSettings {
    int directions = 200;
    double tol = 1e-4;
    bool refine = true;
};

struct PmpSettings {
    std::string path_file;
    double tol = 1e-6;
    int control_grid = 257;
};

/// Everything a run depends on. Serialized as one JSON document.
struct RunConfig {
    Mode mode = Mode::NoDir2D;
    double t_f = 1.0;
    double kappa_max = 1.0;
    uint64_t seed = 1;
    double eps_in_rel = 1e-2;
    CandidateGrid grid;  // t_f / kappa_max mirror the top-level fields
    OracleSettings oracle;
    BoundarySettings boundary;  // seed mirrors the top-level field
    EquivSettings equiv;
    PmpSettings pmp;
    std::string out = "reachset_out";

    /// Throws InvalidInput on out-of-range fields; grid problems surface as
    /// InvalidGrid.
    void validate() const;
    /// Copies top-level scalars into the nested settings.
    void sync();
};

/// Strict parse: unknown keys and wrong types are InvalidInput.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
/// Canonical JSON (sorted keys, 17-digit floats). parse(to_json(c)) == c.
std::string to_json(const RunConfig& c);
/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& c);

bool operator==(const RunConfig& a, const RunConfig& b);

std::string branch_name(Branch b);
Branch parse_branch(const std::string& s);

}  // namespace reachset
