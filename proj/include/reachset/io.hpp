#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reachset/config.hpp"
#include "reachset/pmp.hpp"
#include "reachset/reach.hpp"

namespace reachset {

/// Shortest text of 17 significant digits; '.' separator regardless of locale.
std::string format_double(double v);

/// Writes <out>.boundary.csv and <out>.boundary.json.
void write_boundary(const BoundaryCloud& b, const RunConfig& cfg);
/// Writes <out>.oracle.csv and <out>.oracle.json.
void write_oracle(const OracleCloud& oc, const RunConfig& cfg);

std::string boundary_csv(const BoundaryCloud& b, const RunConfig& cfg);
std::string boundary_metadata(const BoundaryCloud& b, const RunConfig& cfg);
std::string oracle_csv(const OracleCloud& oc, const RunConfig& cfg);
std::string oracle_metadata(const OracleCloud& oc, const RunConfig& cfg);

/// Generator parameters of a candidate as compact JSON.
std::string candidate_json(const Candidate& c);

/// A path file for pmp-check:
/// {"start": {"x","y","theta"} | {"r": [3], "e": [3]}, "kappa_max": k,
///  "segments": [{"kind": "S"|"C"|"H", "length": L, ...}],
///  "costate": [p_tf], "p0": 1, "phi": 0, "step": h, "grad_phi": [g]}
/// C segments carry "curvature" (2D, signed) or "axis" (3D); H segments carry
/// "zeta", "tau0", "taudot0" and "binormal".
struct PathSpec {
    bool spatial = false;
    PlanarPath planar;
    SpatialPath spatial_path;
    StateVec p_tf;
    double p0 = 1.0;
    double phi = 0.0;
    double step = 0.0;
    std::optional<Eigen::VectorXd> grad_phi;  // defaults to p_tf
};
PathSpec parse_path_spec(const std::string& json_text);

/// JSON report with every residual and verdict.
std::string pmp_report_json(const PmpReport& report, const TransversalityResult& tr, const RunConfig& cfg);

/// Parses a path file, integrates its costate and checks it with cfg.pmp.
std::string pmp_check_json(const std::string& path_json, const RunConfig& cfg);

struct EquivRow {
    std::vector<double> direction;
    SupportResult support;
    EquivalenceReport report;
};
std::string equiv_csv(const std::vector<EquivRow>& rows, const RunConfig& cfg);

/// Atomic-enough write: the whole string goes out in one stream.
void write_text(const std::string& path, const std::string& content);

}  // namespace reachset
