#include "reachset/torsion.hpp"

#include <algorithm>

namespace reachset {

HParams::HParams(double z, double t0, double td0, Branch b)
    : zeta(z), tau0(t0), taudot0(td0), branch(b) {
    if (!std::isfinite(z) || !std::isfinite(t0) || !std::isfinite(td0))
        throw InvalidInput("HParams: non-finite value");
    if (b == Branch::Both) throw InvalidInput("HParams: branch must be MinTime or MaxTime");
    if (b == Branch::MinTime && z < 0.0) throw InvalidInput("HParams: MinTime needs zeta >= 0");
    if (b == Branch::MaxTime && z > 0.0) throw InvalidInput("HParams: MaxTime needs zeta <= 0");
    if (std::abs(t0) < kTauMin) throw InvalidInput("HParams: |tau0| below singular threshold");
}

HParams HParams::from_zeta(double z, double t0, double td0) {
    return HParams(z, t0, td0, z < 0.0 ? Branch::MaxTime : Branch::MinTime);
}

double torsion_rhs(const TorsionState& s, double zeta) {
    const double t = s.tau, td = s.taudot;
    if (!std::isfinite(t) || !std::isfinite(td) || !std::isfinite(zeta))
        throw InvalidInput("torsion_rhs: non-finite input");
    if (std::abs(t) < kTauMin) throw TorsionSingularity(0.0);
    return 3.0 * td * td / (2.0 * t) - 2.0 * t * t * t + 2.0 * t - zeta * t * std::sqrt(std::abs(t));
}

namespace {

bool admissible(double tau, double taudot, double sign0) {
    return std::isfinite(tau) && std::isfinite(taudot) && std::abs(tau) >= kTauMin &&
           tau * sign0 > 0.0;
}

// Integrates until length or until the state leaves the admissible region.
// Returns the samples computed; fail_at is set to the arc length of the last
// good sample when the walk stopped early.
std::vector<TorsionSample> integrate_partial(const HParams& h, double length, double step,
                                             std::optional<double>& fail_at) {
    if (!(step > 0.0) || !std::isfinite(step) || !(length >= 0.0) || !std::isfinite(length))
        throw InvalidInput("integrate_torsion: step must be positive and length non-negative");
    const double sign0 = h.tau0 > 0.0 ? 1.0 : -1.0;
    std::vector<TorsionSample> out;
    TorsionState y{h.tau0, h.taudot0};
    out.push_back({0.0, y});
    if (length == 0.0) return out;
    const long n = std::max(1L, static_cast<long>(std::ceil(length / step - 1e-12)));
    const double dt = length / static_cast<double>(n);
    out.reserve(static_cast<size_t>(n) + 1);
    auto f = [&](double tau, double taudot, double& a) {
        if (!admissible(tau, taudot, sign0)) return false;
        a = 3.0 * taudot * taudot / (2.0 * tau) - 2.0 * tau * tau * tau + 2.0 * tau -
            h.zeta * tau * std::sqrt(std::abs(tau));
        return std::isfinite(a);
    };
    for (long i = 0; i < n; ++i) {
        const double s = dt * static_cast<double>(i);
        double a1, a2, a3, a4;
        const double t1 = y.tau, v1 = y.taudot;
        bool ok = f(t1, v1, a1);
        const double t2 = t1 + 0.5 * dt * v1, v2 = v1 + 0.5 * dt * a1;
        ok = ok && f(t2, v2, a2);
        const double t3 = t1 + 0.5 * dt * v2, v3 = v1 + 0.5 * dt * a2;
        ok = ok && f(t3, v3, a3);
        const double t4 = t1 + dt * v3, v4 = v1 + dt * a3;
        ok = ok && f(t4, v4, a4);
        TorsionState next{t1 + dt / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4),
                          v1 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)};
        if (!ok || !admissible(next.tau, next.taudot, sign0)) {
            fail_at = s;
            return out;
        }
        y = next;
        out.push_back({i + 1 == n ? length : s + dt, y});
    }
    return out;
}

// Cubic Hermite interpolation of tau between RK4 samples on a uniform grid.
struct HermiteTorsion {
    const std::vector<TorsionSample>* samples;
    double h;
    double operator()(double s) const {
        const auto& v = *samples;
        if (v.size() == 1) return v[0].state.tau;
        const long last = static_cast<long>(v.size()) - 2;
        long k = static_cast<long>(std::floor(s / h));
        k = std::clamp(k, 0L, last);
        const double u = std::clamp(s / h - static_cast<double>(k), 0.0, 1.0);
        const auto& a = v[static_cast<size_t>(k)].state;
        const auto& b = v[static_cast<size_t>(k + 1)].state;
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * a.tau + (u3 - 2 * u2 + u) * h * a.taudot +
               (-2 * u3 + 3 * u2) * b.tau + (u3 - u2) * h * b.taudot;
    }
};

}  // namespace

std::vector<TorsionSample> integrate_torsion(const HParams& h, double length, double step) {
    std::optional<double> fail;
    auto out = integrate_partial(h, length, step, fail);
    if (fail) throw TorsionSingularity(*fail);
    return out;
}

namespace {

// Substeps per reported step so that the frame turns by at most kTurn per
// substep where |tau| spikes. Capped; extreme spikes get no more than that.
constexpr long kMaxSubsteps = 64;
constexpr double kTurn = 1e-2;

long substeps_for(const std::vector<TorsionSample>& tors, double dh) {
    double peak = 1.0;
    for (const auto& t : tors) peak = std::max(peak, std::abs(t.state.tau));
    return std::clamp(static_cast<long>(std::ceil(peak * dh / kTurn - 1e-9)), 1L, kMaxSubsteps);
}

template <class Visit>
std::optional<double> walk_helix(const Frame3& f0, const HParams& h, double kappa, double length,
                                 double step, Visit&& visit) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidInput("helix: kappa_max must be > 0");
    if (!(step > 0.0) || !(length >= 0.0) || !std::isfinite(length) || !std::isfinite(step))
        throw InvalidInput("helix: step must be positive and length non-negative");
    detail::check_frame(f0);
    const double unit_len = kappa * length;
    const long n = std::max(1L, static_cast<long>(std::ceil(unit_len / (kappa * step) - 1e-12)));
    const double dh = unit_len > 0.0 ? unit_len / static_cast<double>(n) : 1.0;
    std::optional<double> fail;
    auto tors = integrate_partial(h, unit_len, dh, fail);
    long m = 1;
    for (int pass = 0; pass < 4; ++pass) {
        const long want = substeps_for(tors, dh);
        if (want <= m) break;
        m = want;
        fail.reset();
        tors = integrate_partial(h, unit_len, dh / static_cast<double>(m), fail);
    }
    // Report only whole coarse steps so sample counts do not depend on m.
    const long fine = static_cast<long>(tors.size()) - 1;
    const long whole = fail ? fine / m : n;
    const double valid = fail ? dh * static_cast<double>(whole) : unit_len;
    const double dfine = unit_len > 0.0 ? dh / static_cast<double>(m) : 1.0;
    HermiteTorsion prof{&tors, dfine};
    Frame3 unit = f0;
    long idx = 0;
    if (whole > 0 || !fail) {
        frenet_walk(
            unit, [](double) { return 1.0; }, prof, valid, dfine,
            [&](double s, const Frame3& f) {
                if (idx++ % m != 0) return;
                Frame3 g = f;
                g.r = f0.r + (f.r - f0.r) / kappa;
                visit(s / kappa, g, kappa * prof(s));
            });
    } else {
        visit(0.0, f0, kappa * h.tau0);
    }
    if (fail) return valid / kappa;
    return std::nullopt;
}

}  // namespace

HelixResult helical_from_frame(const Frame3& f0, const HParams& h, double kappa_max, double length,
                               double step, bool keep_samples) {
    HelixResult res;
    Frame3 last = f0;
    res.singular_at = walk_helix(f0, h, kappa_max, length, step,
                                 [&](double, const Frame3& f, double) {
                                     last = f;
                                     if (keep_samples) res.samples.push_back(f);
                                 });
    res.end_frame = last;
    res.endpoint.r = last.r;
    res.endpoint.e = last.T;
    return res;
}

HelixResult helical_segment(const Config3& c0, double psi, const HParams& h, double kappa_max,
                            double length, double step) {
    return helical_from_frame(frame_from(c0, psi), h, kappa_max, length, step, true);
}

HelixTrace helical_trace(const Frame3& f0, const HParams& h, double kappa_max, double length,
                         double step) {
    HelixTrace tr;
    auto fail = walk_helix(f0, h, kappa_max, length, step,
                           [&](double s, const Frame3& f, double t) {
                               tr.s.push_back(s);
                               tr.frames.push_back(f);
                               tr.torsion.push_back(t);
                           });
    if (fail) throw TorsionSingularity(*fail);
    return tr;
}

}  // namespace reachset
