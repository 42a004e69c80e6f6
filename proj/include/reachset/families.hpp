#pragma once

#include <string>
#include <vector>

#include "reachset/path.hpp"

namespace reachset {

enum class Mode { Dir2D, NoDir2D, Dir3D, NoDir3D };

/// "2d-dir", "2d-nodir", "3d-dir", "3d-nodir".
std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);
bool is_spatial(Mode m);
bool with_direction(Mode m);
/// Dimension of the endpoint space: 2, 3, 6 or 3.
int endpoint_dim(Mode m);

struct HGrid {
    std::vector<double> zeta{0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0};
    std::vector<double> tau0;
    std::vector<double> taudot0{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    HGrid();
};

struct CandidateGrid {
    double t_f = 1.0;
    double kappa_max = 1.0;
    int arc_resolution = 64;
    int psi_resolution = 32;
    int twist_resolution = 8;
    Branch branch = Branch::Both;
    HGrid h;
    double step = 0.0;  // integration step for H arcs; <= 0 selects default_step(t_f)

    double integration_step() const { return step > 0.0 ? step : default_step(t_f); }
    void validate() const;
};

enum class Family { S, C, CS, SC, CC, CSC, CCC, H };
std::string family_name(Family f);

/// A member of one template family. Arc lengths a1/a2 are, per family:
/// CS: a1 = C; SC: a2 = C; CC: a1 = first C (second takes the rest);
/// CSC: a1 = first C, a2 = last C (S takes the rest);
/// CCC: a1 = first C, a2 = middle C (last takes the rest).
/// s1 / s2 are the planar turn signs of the first / last C. In 3D the
/// planar families lie in the plane spanned by base.e and
/// plane_normal(base.e, psi); twist turns the last C of a CSC about the S line.
struct Candidate {
    Family family = Family::S;
    int s1 = 1;
    int s2 = 1;
    double a1 = 0.0;
    double a2 = 0.0;
    double psi = 0.0;
    double twist = 0.0;
    Branch branch = Branch::MinTime;
    HParams helix{};
};

PlanarPath make_planar_path(const Candidate& c, const CandidateGrid& g, const Config2& start = {});
SpatialPath make_spatial_path(const Candidate& c, const CandidateGrid& g, const Config3& base = {});

/// Segment template of the candidate, e.g. "LSR" (2D) or "CSC" (3D).
std::string candidate_template(const Candidate& c, bool spatial);

/// Candidates with their endpoint features stored row-major: 2D rows are
/// (x, y, unwrapped heading), 3D rows are (r, e).
struct CandidateSet {
    bool spatial = false;
    bool directed = false;
    int dim = 3;
    std::vector<Candidate> items;
    std::vector<double> features;
    long dropped_singular = 0;
    long removed_duplicates = 0;

    size_t size() const { return items.size(); }
    const double* row(size_t i) const { return features.data() + i * static_cast<size_t>(dim); }
};

/// Endpoint features of a single candidate (same layout as CandidateSet rows).
std::vector<double> candidate_features(const Candidate& c, const CandidateGrid& g, bool spatial,
                                       const Config3& base = {});

/// Arc lengths used for C segments: (Phi / kappa) * i / n, i = 1..n with
/// Phi = min(2 pi, kappa * t_f).
std::vector<double> arc_lengths(const CandidateGrid& g);

CandidateSet enumerate_2d(const CandidateGrid& g, bool with_direction);
CandidateSet enumerate_3d(const CandidateGrid& g, bool with_direction, const Config3& base = {});

/// True when template a is obtained from template b by deleting segments.
bool is_degeneration(const std::string& a, const std::string& b);

/// Removes candidates whose endpoints agree within tol with an earlier
/// candidate of a related template, keeping the one with fewest segments.
long deduplicate(CandidateSet& set, double tol = 1e-9);

}  // namespace reachset
