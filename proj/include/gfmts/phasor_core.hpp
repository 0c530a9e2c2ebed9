#ifndef GFMTS_PHASOR_CORE_HPP
#define GFMTS_PHASOR_CORE_HPP

#include "gfmts/types.hpp"

namespace gfmts {

// Quasi-static phasor algebra of the device/grid interface.
// Frame convention (shared by every module): the device d-axis leads the
// grid D-axis by theta, so the inverter voltage is v at angle 0 and the
// Thevenin source appears as v_g at angle -theta.

/// Inverter-side current for a commanded terminal voltage v at APC angle theta.
Phasor inverter_side_current(double theta, double v, const GridCondition& grid,
                             const SystemParams& params, double omega);

/// Right-hand side of the saturation criterion: the device saturates
/// iff cos(theta) <= saturation_rhs(...).
double saturation_rhs(double v, const GridCondition& grid,
                      const SystemParams& params, double omega);

/// Threshold angle: acos of the clamped criterion. 0 when always
/// saturated, pi when saturation is unreachable.
double theta_sat(double v, const GridCondition& grid,
                 const SystemParams& params, double omega);

struct DqVoltage {
    double d = 0.0;
    double q = 0.0;
};

/// Terminal voltage while current-saturated, capacitor neglected.
DqVoltage saturated_terminal_voltage(double theta, const GridCondition& grid,
                                     const SystemParams& params);

/// Terminal voltage while current-saturated, capacitor retained
/// (lossless grid). theta places the grid source at -theta in the
/// device frame.
Phasor saturated_voltage_with_capacitor(double theta, const Phasor& i_s,
                                        const GridCondition& grid,
                                        const SystemParams& params,
                                        double omega);

/// Power-angle relation in normal operation.
double unsaturated_power(double theta, double v, const GridCondition& grid);

/// Power-angle relation in current saturation.
double saturated_power(double theta, const GridCondition& grid,
                       const SystemParams& params, double omega);

} // namespace gfmts

#endif
