#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "reachset/path.hpp"

namespace reachset {

/// Up to six entries: (x, y, theta) in 2D, (r, e) in 3D. Fixed capacity, no
/// heap allocation.
using StateVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;
/// Scalar curvature in 2D, curvature vector in 3D.
using ControlVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

/// p . f(x, u) + p0 * phi. In 3D, f_e is the tangent projection of u.
double hamiltonian(const StateVec& p, const StateVec& x, const ControlVec& u, double p0,
                   double phi);

/// State and control samples along a path. Every segment is sampled on its own
/// uniform grid so a junction appears twice (end of one segment, start of the
/// next). The 2D heading is unwrapped.
struct Trajectory {
    bool spatial = false;
    double kappa_max = 1.0;
    std::vector<double> t;
    std::vector<StateVec> x;
    std::vector<ControlVec> u;
    std::vector<int> segment;
};

/// Samples every segment at spacing <= step. half_steps adds the midpoints
/// used by the costate RK4 (odd indices within a segment).
Trajectory sample_trajectory(const PlanarPath& p, double step, bool half_steps = false);
Trajectory sample_trajectory(const SpatialPath& p, double step, bool half_steps = false);

struct CostateTraj {
    bool spatial = false;
    double kappa_max = 1.0;
    std::vector<double> t;
    std::vector<StateVec> x;
    std::vector<ControlVec> u;
    std::vector<int> segment;
    std::vector<StateVec> p;
    double p0 = 0.0;
    double phi = 0.0;

    size_t size() const { return t.size(); }
    double hamiltonian_at(size_t i) const;
};

/// Backward RK4 of the adjoint from p(t_f) = p_tf. 2D: p_theta' =
/// p_x sin(theta) - p_y cos(theta). 3D: p_r' = 0, p_e' = -p_r + (p_e . e) u.
/// Throws NontrivialityViolation for p_tf ~ 0 with p0 ~ 0.
CostateTraj integrate_costate(const PlanarPath& path, const StateVec& p_tf, double p0, double phi,
                              double step);
CostateTraj integrate_costate(const SpatialPath& path, const StateVec& p_tf, double p0, double phi,
                              double step);

struct PmpReport {
    double max_pointwise_gap = 0.0;
    double gap_time = 0.0;
    double hamiltonian_drift = 0.0;
    double hamiltonian_level = 0.0;
    double max_abs_hamiltonian = 0.0;  // max_t |H(t)| including p0 * phi
    double transversality_residual = 0.0;
    double p0 = 0.0;
    double phi = 0.0;
    double tol = 0.0;
    bool pointwise_pass = false;
    bool constancy_pass = false;
    bool transversality_pass = false;
};

/// Worst Hamiltonian suboptimality of the used control over the control grid
/// (257 points in 2D; resolution angles x {0, k/2, k} in 3D, plus the
/// analytic maximizer). Samples at segment junctions are skipped.
PmpReport check_pointwise_max(const CostateTraj& costate, int control_grid_resolution, double tol);

/// max_t |H(t) - H(0)|.
double check_hamiltonian_constancy(const CostateTraj& costate);

struct TransversalityResult {
    double residual = 0.0;
    double p0 = 0.0;
    bool pass = false;
};

/// p0 = <p_tf, g> / |g|^2, residual = |p_tf - p0 g|; pass iff residual <= tol
/// and p0 >= -tol.
TransversalityResult check_transversality_reach(const Eigen::VectorXd& p_tf,
                                                const Eigen::VectorXd& grad_phi, double tol);

struct Decomposition {
    double p0 = 0.0;
    std::optional<Eigen::VectorXd> grad_phi;  // full length, zero outside I
    Eigen::VectorXd beta;                     // entries of p_tf on the complement of I
    bool degenerate = false;
    double residual = 0.0;
};

/// Splits p_tf = p0 * gradPhi_I + (beta on the complement). Indices are
/// zero-based; I must be a nonempty proper subset.
Decomposition decompose_transversality(const Eigen::VectorXd& p_tf, const std::vector<int>& index_set,
                                       double tol);
Eigen::VectorXd reconstruct(const Decomposition& d, const std::vector<int>& index_set, int n);

enum class ProblemType { MinTime, MaxTime, Abnormal };
std::string problem_type_name(ProblemType t);

struct EquivalenceReport {
    PmpReport reach;         // reachability form, p(t_f) = c, p0 = 1, phi = 0
    PmpReport time_optimal;  // same costate with p0_B * phi = -H(0)
    ProblemType problem = ProblemType::MinTime;
    bool reach_pass = false;
    bool time_optimal_pass = false;
    bool pass = false;
};

/// Lifts a direction in endpoint space to a terminal costate: 2D accepts 2 or
/// 3 entries, 3D accepts 3 or 6.
StateVec direction_costate(const Eigen::VectorXd& c, bool spatial);

/// step <= 0 selects default_step(path length).
EquivalenceReport equivalence_check(const PlanarPath& path, const Eigen::VectorXd& c, double tol,
                                    double step = 0.0, int control_grid = 257);
EquivalenceReport equivalence_check(const SpatialPath& path, const Eigen::VectorXd& c, double tol,
                                    double step = 0.0, int control_grid = 64);

}  // namespace reachset
