#pragma once

#include <optional>
#include <vector>

#include "reachset/geom.hpp"

namespace reachset {

inline constexpr double kTauMin = 1e-6;

enum class Branch { MinTime, MaxTime, Both };

struct TorsionState {
    double tau = 1.0;
    double taudot = 0.0;
};

/// Parameters of a unit-curvature helicoidal arc. zeta >= 0 is the
/// minimum-time branch, zeta <= 0 the maximum-time branch.
struct HParams {
    double zeta = 0.0;
    double tau0 = 1.0;
    double taudot0 = 0.0;
    Branch branch = Branch::MinTime;

    HParams() = default;
    HParams(double zeta, double tau0, double taudot0, Branch branch);
    /// Branch chosen from the sign of zeta (zero counts as minimum time).
    static HParams from_zeta(double zeta, double tau0, double taudot0);
};

/// Second derivative of torsion with respect to arc length.
double torsion_rhs(const TorsionState& s, double zeta);

struct TorsionSample {
    double s;
    TorsionState state;
};

/// Fixed-step RK4 of the torsion ODE over [0, length]. Steps are uniform
/// (length / ceil(length / step)). Throws TorsionSingularity carrying the arc
/// length of the first sample where |tau| < kTauMin or tau changes sign.
std::vector<TorsionSample> integrate_torsion(const HParams& h, double length, double step);

struct HelixResult {
    Config3 endpoint;
    Frame3 end_frame;
    std::vector<Frame3> samples;
    std::optional<double> singular_at;  // set when the arc was truncated
};

/// Helicoidal arc from c0 with initial normal plane_normal(c0.e, psi),
/// curvature kappa_max and torsion following the rescaled unit solution.
HelixResult helical_segment(const Config3& c0, double psi, const HParams& h, double kappa_max,
                            double length, double step);

/// Same arc launched from an explicit frame; samples are kept only when
/// keep_samples is set.
HelixResult helical_from_frame(const Frame3& f0, const HParams& h, double kappa_max, double length,
                               double step, bool keep_samples);

/// Frenet frames of the helicoidal arc with their arc lengths; throws
/// TorsionSingularity instead of truncating.
struct HelixTrace {
    std::vector<double> s;
    std::vector<Frame3> frames;
    std::vector<double> torsion;  // geometric torsion at each sample
};
HelixTrace helical_trace(const Frame3& f0, const HParams& h, double kappa_max, double length,
                         double step);

}  // namespace reachset
