#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace reachset {

/// Box bounds plus pairwise sum caps x[i] + x[j] <= cap.
struct Domain {
    Eigen::VectorXd lo, hi;
    struct SumCap {
        int i, j;
        double cap;
    };
    std::vector<SumCap> caps;

    bool feasible(const Eigen::VectorXd& x) const;
    Eigen::VectorXd clamp(Eigen::VectorXd x) const;
};

struct MaximizeOptions {
    Eigen::VectorXd scale;  // typical parameter scale; one entry per parameter
    int simplex_evals = 240;
    int newton_iters = 40;
};

struct MaximizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evals = 0;
};

/// Bounded Nelder-Mead followed by an active-set Newton polish with finite
/// differences. Infeasible or non-finite evaluations count as -inf. The result
/// is never worse than the starting point.
MaximizeResult maximize(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                        const Domain& dom, const MaximizeOptions& opt);

}  // namespace reachset
