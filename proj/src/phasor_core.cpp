#include "gfmts/phasor_core.hpp"

#include <algorithm>

namespace gfmts {

void SystemParams::validate() const {
    for (double v : {s_base, omega_n, p0, q0, h, d_p, d_q, v0, i_s_max, beta, c_f, x_tr}) {
        require_finite(v, "SystemParams field");
    }
    if (i_s_max <= 0.0) throw ParameterError("i_s_max must be positive");
    if (h <= 0.0) throw ParameterError("h must be positive");
    if (d_p <= 0.0) throw ParameterError("d_p must be positive");
    if (omega_n <= 0.0) throw ParameterError("omega_n must be positive");
    if (beta <= -kPi / 2.0 || beta > 0.0) {
        throw ParameterError("beta must lie in (-pi/2, 0]");
    }
    if (c_f < 0.0 || x_tr < 0.0 || v0 < 0.0 || d_q < 0.0) {
        throw ParameterError("per-unit magnitudes must be non-negative");
    }
}

void GridCondition::validate() const {
    require_finite(v_g, "v_g");
    require_finite(z, "z");
    require_finite(phi, "phi");
    if (v_g < 0.0) throw ParameterError("v_g must be non-negative");
    if (z <= 0.0) throw ParameterError("z must be positive");
    if (phi <= 0.0 || phi > kPi / 2.0) throw ParameterError("phi must lie in (0, pi/2]");
}

Phasor inverter_side_current(double theta, double v, const GridCondition& grid,
                             const SystemParams& params, double omega) {
    require_finite(theta, "theta");
    require_finite(v, "v");
    require_finite(omega, "omega");
    grid.validate();
    if (v <= 0.0) throw DomainError("terminal voltage must be positive");

    const double vg = grid.v_g;
    const double z = grid.z;
    const double phi = grid.phi;
    Phasor i;
    i.re = (v / z) * std::cos(phi) - (vg / z) * std::cos(theta + phi);
    i.im = params.c_f * v * params.omega_n * omega + (vg / z) * std::sin(theta + phi)
           - (v / z) * std::sin(phi);
    return i;
}

double saturation_rhs(double v, const GridCondition& grid,
                      const SystemParams& params, double omega) {
    require_finite(v, "v");
    require_finite(omega, "omega");
    grid.validate();
    if (v <= 0.0) throw DomainError("terminal voltage must be positive");
    if (grid.v_g <= 0.0) throw ParameterError("degenerate grid: v_g must be positive");

    const double vg = grid.v_g;
    const double z = grid.z;
    const double x = grid.x();
    const double c = params.c_f * params.omega_n * omega;
    const double denom = 1.0 - x * c;
    if (denom <= 0.0) throw ParameterError("1 - X*C*omega_n*omega must be positive");

    const double zi = z * params.i_s_max;
    double r = 0.5 * (vg / v + v / vg);
    r -= zi * zi / (2.0 * vg * v);
    r += v * c * c * z * z / (2.0 * vg);
    r -= z * (v / vg) * c * std::sin(grid.phi);
    return r / denom;
}

double theta_sat(double v, const GridCondition& grid,
                 const SystemParams& params, double omega) {
    const double r = saturation_rhs(v, grid, params, omega);
    return std::acos(std::clamp(r, -1.0, 1.0));
}

DqVoltage saturated_terminal_voltage(double theta, const GridCondition& grid,
                                     const SystemParams& params) {
    require_finite(theta, "theta");
    grid.validate();
    const double zi = grid.z * params.i_s_max;
    DqVoltage v;
    v.d = grid.v_g * std::cos(theta) + zi * std::cos(params.beta + grid.phi);
    v.q = -grid.v_g * std::sin(theta) + zi * std::sin(params.beta + grid.phi);
    return v;
}

Phasor saturated_voltage_with_capacitor(double theta, const Phasor& i_s,
                                        const GridCondition& grid,
                                        const SystemParams& params,
                                        double omega) {
    require_finite(theta, "theta");
    require_finite(i_s.re, "i_s.re");
    require_finite(i_s.im, "i_s.im");
    grid.validate();
    const double x = grid.x();
    const double c = params.c_f * params.omega_n * omega;
    const double denom = 1.0 - x * c;
    if (denom <= 0.0) throw ParameterError("1 - X*C*omega_n*omega must be positive");

    const Phasor vg{grid.v_g * std::cos(theta), -grid.v_g * std::sin(theta)};
    // j*X*I_s rotates I_s by +90 degrees.
    const Phasor jxi{-x * i_s.im, x * i_s.re};
    return {(jxi.re + vg.re) / denom, (jxi.im + vg.im) / denom};
}

double unsaturated_power(double theta, double v, const GridCondition& grid) {
    require_finite(theta, "theta");
    require_finite(v, "v");
    grid.validate();
    const double x = grid.x();
    if (x <= 0.0) throw ParameterError("degenerate grid: X must be positive");
    return grid.v_g * v / x * std::sin(theta);
}

double saturated_power(double theta, const GridCondition& grid,
                       const SystemParams& params, double omega) {
    require_finite(theta, "theta");
    require_finite(omega, "omega");
    grid.validate();
    const double c = params.c_f * params.omega_n * omega;
    const double denom = 1.0 - grid.x() * c;
    if (denom <= 0.0) throw ParameterError("1 - X*C*omega_n*omega must be positive");
    return params.i_s_max * grid.v_g * std::cos(theta + params.beta) / denom;
}

} // namespace gfmts
