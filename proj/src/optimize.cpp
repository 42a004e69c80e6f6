#include "reachset/optimize.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reachset {

bool Domain::feasible(const Eigen::VectorXd& x) const {
    if (!x.allFinite()) return false;
    for (int i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
    for (const auto& c : caps)
        if (x[c.i] + x[c.j] > c.cap) return false;
    return true;
}

Eigen::VectorXd Domain::clamp(Eigen::VectorXd x) const {
    for (int i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    for (const auto& c : caps) {
        const double over = x[c.i] + x[c.j] - c.cap;
        if (over > 0.0) {
            x[c.i] = std::max(lo[c.i], x[c.i] - over / 2.0);
            x[c.j] = std::min(x[c.j], c.cap - x[c.i]);
        }
    }
    return x;
}

namespace {

struct Counter {
    const std::function<double(const Eigen::VectorXd&)>& f;
    const Domain& dom;
    int evals = 0;
    double operator()(const Eigen::VectorXd& x) {
        if (!dom.feasible(x)) return -INFINITY;
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : -INFINITY;
    }
};

void nelder_mead(Counter& F, Eigen::VectorXd& best, double& fbest, const Eigen::VectorXd& scale, int budget) {
    const int n = static_cast<int>(best.size());
    std::vector<Eigen::VectorXd> s{best};
    std::vector<double> fs{fbest};
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd v = best;
        double h = scale[i];
        double fv = -INFINITY;
        for (int t = 0; t < 8 && !std::isfinite(fv); ++t, h *= 0.5) {
            v = best;
            v[i] += h;
            fv = F(v);
            if (!std::isfinite(fv)) {
                v[i] = best[i] - h;
                fv = F(v);
            }
        }
        if (!std::isfinite(fv)) v = best, fv = fbest;
        s.push_back(v);
        fs.push_back(fv);
    }
    std::vector<int> idx(static_cast<size_t>(n + 1));
    const int start = F.evals;
    while (F.evals - start < budget) {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] > fs[b]; });
        const int hi = idx[0], lo = idx[n], second = idx[n - 1];
        double size = 0.0;
        for (int i = 0; i <= n; ++i) size = std::max(size, ((s[i] - s[hi]).array() / scale.array()).abs().maxCoeff());
        if (size < 1e-9) break;
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != lo) c += s[i];
        c /= n;
        const Eigen::VectorXd xr = c + (c - s[lo]);
        const double fr = F(xr);
        if (fr > fs[hi]) {
            const Eigen::VectorXd xe = c + 2.0 * (c - s[lo]);
            const double fe = F(xe);
            if (fe > fr) s[lo] = xe, fs[lo] = fe;
            else s[lo] = xr, fs[lo] = fr;
        } else if (fr > fs[second]) {
            s[lo] = xr, fs[lo] = fr;
        } else {
            const bool outside = fr > fs[lo];
            const Eigen::VectorXd xc = outside ? Eigen::VectorXd(c + 0.5 * (xr - c)) : Eigen::VectorXd(c + 0.5 * (s[lo] - c));
            const double fc = F(xc);
            if (fc > std::max(fs[lo], outside ? fr : -INFINITY)) {
                s[lo] = xc, fs[lo] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == hi) continue;
                    s[i] = s[hi] + 0.5 * (s[i] - s[hi]);
                    fs[i] = F(s[i]);
                }
            }
        }
    }
    for (int i = 0; i <= n; ++i)
        if (fs[i] > fbest) fbest = fs[i], best = s[i];
}

// A constraint is described by a normal a with a.x <= b.
struct Constraint {
    Eigen::VectorXd a;
    double b;
};

std::vector<Constraint> constraints(const Domain& d, int n) {
    std::vector<Constraint> out;
    for (int i = 0; i < n; ++i) {
        if (std::isfinite(d.lo[i])) {
            Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
            a[i] = -1.0;
            out.push_back({a, -d.lo[i]});
        }
        if (std::isfinite(d.hi[i])) {
            Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
            a[i] = 1.0;
            out.push_back({a, d.hi[i]});
        }
    }
    for (const auto& c : d.caps) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        a[c.i] = 1.0;
        a[c.j] = 1.0;
        out.push_back({a, c.cap});
    }
    return out;
}

Eigen::MatrixXd null_space(const std::vector<Eigen::VectorXd>& rows, int n) {
    if (rows.empty()) return Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd A(n, static_cast<int>(rows.size()));
    for (size_t k = 0; k < rows.size(); ++k) A.col(static_cast<int>(k)) = rows[k];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    const int r = static_cast<int>(qr.rank());
    Eigen::MatrixXd Q = qr.householderQ();
    return Q.rightCols(n - r);
}

void newton_polish(Counter& F, Eigen::VectorXd& x, double& fx, const Domain& dom, const Eigen::VectorXd& scale,
                   int iters) {
    const int n = static_cast<int>(x.size());
    const auto cons = constraints(dom, n);
    const double hg = 1e-6, hh = 1e-4;
    double radius = 0.5;
    std::vector<char> released(cons.size(), 0);
    for (int it = 0; it < iters; ++it) {
        // Work in scaled coordinates y = x / scale.
        auto at = [&](const Eigen::VectorXd& dy) { return F(x + scale.cwiseProduct(dy)); };
        std::vector<Eigen::VectorXd> active;
        std::vector<size_t> active_id;
        for (size_t k = 0; k < cons.size(); ++k) {
            const Eigen::VectorXd as = cons[k].a.cwiseProduct(scale);
            const double slack = (cons[k].b - cons[k].a.dot(x)) / as.norm();
            if (slack <= 1e-9) {
                active.push_back(as);
                active_id.push_back(k);
            }
        }
        // Drop active constraints whose interior side increases f.
        std::vector<Eigen::VectorXd> keep;
        for (size_t q = 0; q < active.size(); ++q) {
            const Eigen::VectorXd d = -active[q].normalized();
            const double f1 = at(hg * 10 * d);
            if (std::isfinite(f1) && (f1 - fx) > 1e-13 * (1.0 + std::abs(fx))) continue;
            keep.push_back(active[q]);
        }
        const Eigen::MatrixXd Z = null_space(keep, n);
        const int m = static_cast<int>(Z.cols());
        if (m == 0) return;
        Eigen::VectorXd g(m);
        for (int i = 0; i < m; ++i) {
            const double fp = at(hg * Z.col(i)), fm = at(-hg * Z.col(i));
            if (std::isfinite(fp) && std::isfinite(fm)) g[i] = (fp - fm) / (2 * hg);
            else if (std::isfinite(fp)) g[i] = (fp - fx) / hg;
            else if (std::isfinite(fm)) g[i] = (fx - fm) / hg;
            else g[i] = 0.0;
        }
        Eigen::MatrixXd Hm(m, m);
        bool hess_ok = true;
        for (int i = 0; i < m && hess_ok; ++i) {
            const double fp = at(hh * Z.col(i)), fm = at(-hh * Z.col(i));
            if (!std::isfinite(fp) || !std::isfinite(fm)) hess_ok = false;
            else Hm(i, i) = (fp - 2 * fx + fm) / (hh * hh);
            for (int j = 0; j < i && hess_ok; ++j) {
                const Eigen::VectorXd a = Z.col(i), b = Z.col(j);
                const double fpp = at(hh * (a + b)), fpm = at(hh * (a - b));
                const double fmp = at(hh * (-a + b)), fmm = at(-hh * (a + b));
                if (!std::isfinite(fpp) || !std::isfinite(fpm) || !std::isfinite(fmp) || !std::isfinite(fmm))
                    hess_ok = false;
                else Hm(i, j) = Hm(j, i) = (fpp - fpm - fmp + fmm) / (4 * hh * hh);
            }
        }
        Eigen::VectorXd step;
        if (hess_ok) {
            Eigen::LLT<Eigen::MatrixXd> llt(-Hm);
            if (llt.info() == Eigen::Success) step = llt.solve(g);
        }
        if (step.size() == 0) step = g.normalized() * radius;
        if (step.norm() > radius) step *= radius / step.norm();
        Eigen::VectorXd dy = Z * step;
        // Clip to the feasible region.
        double amax = 1.0;
        for (const auto& c : cons) {
            const double rate = c.a.dot(scale.cwiseProduct(dy));
            if (rate > 0.0) amax = std::min(amax, (c.b - c.a.dot(x)) / rate);
        }
        amax = std::max(0.0, amax);
        bool improved = false;
        double alpha = amax;
        for (int ls = 0; ls < 30 && alpha > 0.0; ++ls, alpha *= 0.5) {
            Eigen::VectorXd xn = x + alpha * scale.cwiseProduct(dy);
            if (!dom.feasible(xn)) xn = dom.clamp(xn);
            const double fn = F(xn);
            if (fn > fx) {
                const double moved = ((xn - x).array() / scale.array()).abs().maxCoeff();
                x = xn;
                fx = fn;
                improved = true;
                if (moved < 1e-13) return;
                break;
            }
        }
        if (!improved) return;
        radius = std::min(1.0, radius * 2.0);
    }
}

}  // namespace

MaximizeResult maximize(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                        const Domain& dom, const MaximizeOptions& opt) {
    Counter F{f, dom};
    MaximizeResult res;
    res.x = x0;
    res.value = F(x0);
    if (x0.size() == 0 || !std::isfinite(res.value)) {
        res.evals = F.evals;
        return res;
    }
    Eigen::VectorXd scale = opt.scale.size() == x0.size() ? opt.scale : Eigen::VectorXd::Ones(x0.size());
    nelder_mead(F, res.x, res.value, scale, opt.simplex_evals);
    newton_polish(F, res.x, res.value, dom, scale, opt.newton_iters);
    res.evals = F.evals;
    return res;
}

}  // namespace reachset
