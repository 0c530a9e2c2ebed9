#include "gfmts/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gfmts {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

std::vector<double> project(std::vector<double> x, const std::vector<double>& lo,
                            const std::vector<double>& hi) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = clamp(x[i], lo[i], hi[i]);
    return x;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_inf(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

} // namespace

std::vector<double> fd_gradient(const ObjectiveFn& f, const std::vector<double>& x,
                                double scale) {
    std::vector<double> g(x.size());
    std::vector<double> p = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = scale * std::max(1.0, std::abs(x[i]));
        const double xi = x[i];
        p[i] = xi + h;
        const double fp = f(p);
        p[i] = xi - h;
        const double fm = f(p);
        p[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

BoxMinimizeResult minimize_box(const ObjectiveFn& f, std::vector<double> x0,
                               const std::vector<double>& lo, const std::vector<double>& hi,
                               int max_iter, double grad_tol) {
    const std::size_t n = x0.size();
    BoxMinimizeResult res;
    res.x = project(std::move(x0), lo, hi);
    res.value = f(res.x);
    if (n == 0) return res;

    // Dense inverse-Hessian estimate, identity start.
    std::vector<double> hmat(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) hmat[i * n + i] = 1.0;

    std::vector<double> g = fd_gradient(f, res.x);
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        // Projected-gradient stationarity check.
        std::vector<double> pg(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double trial = clamp(res.x[i] - g[i], lo[i], hi[i]);
            pg[i] = res.x[i] - trial;
        }
        if (norm_inf(pg) < grad_tol) break;

        std::vector<double> dir(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) dir[i] -= hmat[i * n + j] * g[j];
        }
        if (dot(dir, g) > -1e-14) { // not a descent direction: steepest descent
            for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
            for (std::size_t i = 0; i < n * n; ++i) hmat[i] = 0.0;
            for (std::size_t i = 0; i < n; ++i) hmat[i * n + i] = 1.0;
        }

        double alpha = 1.0;
        std::vector<double> x_new;
        double f_new = res.value;
        bool improved = false;
        for (int ls = 0; ls < 40; ++ls) {
            std::vector<double> cand(n);
            for (std::size_t i = 0; i < n; ++i) cand[i] = res.x[i] + alpha * dir[i];
            cand = project(std::move(cand), lo, hi);
            const double fc = f(cand);
            if (fc < res.value - 1e-12 * std::abs(res.value) - 1e-16) {
                x_new = std::move(cand);
                f_new = fc;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) break;

        std::vector<double> g_new = fd_gradient(f, x_new);
        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - res.x[i];
            y[i] = g_new[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12) {
            // BFGS inverse update.
            std::vector<double> hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) hy[i] += hmat[i * n + j] * y[j];
            }
            const double yhy = dot(y, hy);
            const double c1 = (sy + yhy) / (sy * sy);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    hmat[i * n + j] += c1 * s[i] * s[j]
                                       - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        res.x = std::move(x_new);
        res.value = f_new;
        g = std::move(g_new);
    }
    return res;
}

} // namespace gfmts
