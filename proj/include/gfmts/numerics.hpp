#ifndef GFMTS_NUMERICS_HPP
#define GFMTS_NUMERICS_HPP

#include <functional>
#include <vector>

namespace gfmts {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

/// Central-difference gradient, h_j = scale * max(1, |x_j|).
/// This is the gradient the MPC inner solver descends on.
std::vector<double> fd_gradient(const ObjectiveFn& f, const std::vector<double>& x,
                                double scale = 1e-6);

struct BoxMinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
};

/// Quasi-Newton (damped BFGS) descent with projection onto [lo, hi] and
/// Armijo backtracking. Small, dense, derivative-free via fd_gradient.
BoxMinimizeResult minimize_box(const ObjectiveFn& f, std::vector<double> x0,
                               const std::vector<double>& lo, const std::vector<double>& hi,
                               int max_iter, double grad_tol = 1e-9);

} // namespace gfmts

#endif
