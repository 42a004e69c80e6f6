#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "reachset/families.hpp"
#include "reachset/pmp.hpp"

namespace reachset {

/// Row-major point storage.
struct PointCloud {
    int dim = 0;
    std::vector<double> data;

    size_t size() const { return dim == 0 ? 0 : data.size() / static_cast<size_t>(dim); }
    const double* row(size_t i) const { return data.data() + i * static_cast<size_t>(dim); }
    void push(const double* p) { data.insert(data.end(), p, p + dim); }
};

/// UniformPiecewise: i.i.d. constant controls on n_pieces equal intervals.
/// BangStraight: 1..n_pieces segments with flat-Dirichlet lengths, each a
/// full-curvature arc (random plane in 3D) or straight.
enum class ControlModel { UniformPiecewise, BangStraight };
std::string control_model_name(ControlModel m);
ControlModel parse_control_model(const std::string& s);

struct OracleCloud {
    Mode mode = Mode::NoDir2D;
    double t_f = 1.0;
    double kappa_max = 1.0;
    uint64_t seed = 0;
    int n_samples = 0;
    int n_pieces = 0;
    ControlModel model = ControlModel::UniformPiecewise;
    PointCloud points;  // endpoint_dim(mode) columns; 2D heading is unwrapped
};

/// Endpoints of random admissible controls from the origin (heading +x).
/// Sample i uses its own generator seeded from (seed, i), so the cloud does
/// not depend on the worker count.
OracleCloud mc_oracle(Mode mode, double t_f, int n_samples, int n_pieces, uint64_t seed,
                      double kappa_max = 1.0, ControlModel model = ControlModel::UniformPiecewise);

struct SupportResult {
    double value = 0.0;       // <c, endpoint> after refinement
    double grid_value = 0.0;  // best value on the raw grid
    std::vector<double> endpoint;
    Candidate generator;
    std::string family;
    bool refined = false;
};

/// Enumerates the candidate families once and answers support queries.
class SupportSweeper {
public:
    SupportSweeper(Mode mode, const CandidateGrid& grid, const Config3& base = {});
    /// Best candidate for <c, endpoint>; ties break by stream order. With
    /// refine, the best grid members of the leading templates are optimized
    /// over their continuous parameters.
    SupportResult query(const Eigen::VectorXd& c, bool refine = true) const;

    Mode mode() const { return mode_; }
    const CandidateGrid& grid() const { return grid_; }
    const CandidateSet& candidates() const { return set_; }
    const Config3& base() const { return base_; }

private:
    Mode mode_;
    CandidateGrid grid_;
    Config3 base_;
    CandidateSet set_;
};

SupportResult support_point(Mode mode, const Eigen::VectorXd& c, const CandidateGrid& grid,
                            bool refine = true);

/// Endpoint (in the mode's endpoint space) of a candidate.
std::vector<double> endpoint_of(Mode mode, const Candidate& c, const CandidateGrid& grid,
                                const Config3& base = {});

/// Equivalence check of a candidate's path against direction c at tol.
EquivalenceReport check_candidate(Mode mode, const Candidate& c, const CandidateGrid& grid,
                                  const Eigen::VectorXd& dir, double tol, const Config3& base = {});

struct BoundarySettings {
    int validation_samples = 20000;
    int validation_pieces = 20;
    uint64_t seed = 1;
    int witness_samples = 100000;
    int witness_max_segments = 5;
    double eps_dom_rel = 1e-6;       // eps_dom = eps_dom_rel * t_f
    double radius_rel = 0.05;        // dominance neighbourhood = radius_rel * t_f
    double cone_half_angle_deg = 60.0;
    int support_directions = 64;     // direction modes only
    bool refine_supports = true;
    double tol_closed = 1e-6;
    double tol_integrated = 1e-4;
    int control_grid_2d = 257;
    int control_grid_3d = 64;
};

struct BoundaryPoint {
    std::vector<double> endpoint;
    std::vector<double> normal;  // outward normal from the terminal costate
    Candidate generator;
    std::string family;
    bool pmp_pass = false;
    double gap = 0.0;
    double drift = 0.0;
    int support_index = -1;
};

struct SupportRecord {
    std::vector<double> direction;  // unit
    double value = 0.0;
    std::string family;
    bool equivalence_pass = false;
};

struct BoundaryCounts {
    long candidates = 0;
    long dropped_singular = 0;
    long removed_duplicates = 0;
    long pmp_failed = 0;
    long dominated = 0;
    long witnesses = 0;
    long points = 0;
};

struct BoundaryCloud {
    Mode mode = Mode::NoDir2D;
    double t_f = 1.0;
    double kappa_max = 1.0;
    CandidateGrid grid;
    BoundarySettings settings;
    std::vector<BoundaryPoint> points;
    std::vector<SupportRecord> supports;
    BoundaryCounts counts;
};

/// Enumerate, screen every candidate with its family costate seeds, then drop
/// points with a witness inside the cone around their outward normal.
/// Paths start at the origin heading +x, matching mc_oracle.
BoundaryCloud build_boundary(Mode mode, const CandidateGrid& grid, const BoundarySettings& settings);

/// Fraction of oracle points outside the boundary region by more than eps.
/// Nodir modes: nearest boundary point (3D reduced to axial/radial
/// coordinates) and its outward normal. Direction modes: recorded support
/// values.
double containment_check(const BoundaryCloud& boundary, const OracleCloud& oracle, double eps);

/// n unit directions in R^dim, uniform on the sphere, reproducible from seed.
std::vector<Eigen::VectorXd> random_directions(int dim, int n, uint64_t seed);

/// Boundary scaled about its centroid (negative control).
BoundaryCloud shrink(const BoundaryCloud& b, double factor);

/// Symmetric Hausdorff distance between a 2D-nodir boundary revolved about the
/// x axis and a 3D-nodir boundary, measured in (axial, radial) coordinates.
double revolution_hausdorff(const BoundaryCloud& planar, const BoundaryCloud& spatial);

/// (axial, radial) coordinates of a 3D position relative to the origin and +x.
std::array<double, 2> reduce_axial(const double* r);

}  // namespace reachset
