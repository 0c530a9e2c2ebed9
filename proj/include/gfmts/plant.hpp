#ifndef GFMTS_PLANT_HPP
#define GFMTS_PLANT_HPP

#include "gfmts/phasor_core.hpp"
#include "gfmts/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gfmts {

enum class Mode {
    Saturated = 0, // matches the binary n(k)=0
    Normal = 1,    // n(k)=1
};

struct ApcState {
    double theta = 0.0; // rad
    double omega = 1.0; // p.u.
    Mode mode = Mode::Normal;
    double time = 0.0;  // s
};

/// Corrective pair produced by a strategy at a controller tick.
/// delta_theta_c is the phase jump injected at that tick (the increment
/// of the cumulative corrective angle).
struct ControlInput {
    double delta_p_ref = 0.0;  // p.u.
    double delta_theta_c = 0.0; // rad

    bool zero() const { return delta_p_ref == 0.0 && delta_theta_c == 0.0; }
};

/// Piecewise-constant grid schedule: pre-fault / fault-on / post-fault.
struct FaultScenario {
    GridCondition pre_fault;
    GridCondition fault;
    GridCondition post_fault;
    double t_fault_on = 0.1;
    double t_fault_clear = 0.55;

    void validate() const;
    const GridCondition& at(double t) const {
        if (t >= t_fault_on && t < t_fault_clear) return fault;
        return t < t_fault_on ? pre_fault : post_fault;
    }
    bool fault_active(double t) const { return t >= t_fault_on && t < t_fault_clear; }
};

struct TrajectorySample {
    double time = 0.0;
    double theta = 0.0;
    double omega = 1.0;
    Mode mode = Mode::Normal;
    double p_out = 0.0;
    double v_d = 0.0;
    double v_q = 0.0;
    double delta_p_ref = 0.0;   // applied corrective power at this time
    double delta_theta_c = 0.0; // cumulative corrective phase
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;
    std::vector<std::string> events; // strategy failures, contract violations
    double dt = 0.0;

    int saturated_to_normal_transitions() const;
    int mode_transitions() const;
    double peak_theta() const;
};

/// Reactive-power droop of the RPC. When disabled the commanded voltage
/// is the constant set point V_0; when enabled, v_ref = V_0 + D_q (Q_0 - Q)
/// with Q measured at the device terminal for the live operating mode.
struct RpcModel {
    bool droop_enabled = false;

    double v_ref(Mode mode, double theta, const GridCondition& grid,
                 const SystemParams& params, double omega) const;
};

/// Plant-level options shared by a simulation run.
struct PlantOptions {
    bool hold_enabled = true;          // 95% saturation hold (mode-oscillation mitigation)
    bool crs_enabled = true;           // false = unlimited current device (no saturation)
    std::optional<double> omega_bound; // |omega - omega_0| clamp, p.u.
    RpcModel rpc;
};

/// Mode-dependent electrical power at the current state.
double electrical_power(const ApcState& state, const GridCondition& grid,
                        const SystemParams& params, double v_ref);

/// Mode automaton. v_ref drives the entry criterion; v_ref_release drives
/// the release current check (they coincide unless the RPC droop makes the
/// commanded voltage mode-dependent); v_ref_normal is the voltage the RPC
/// would command right after a release and gates re-entry when the
/// mitigation hold is enabled.
Mode mode_transition(const ApcState& state, const GridCondition& grid,
                     const SystemParams& params, double v_ref, bool hold_enabled,
                     double v_ref_release = -1.0, double v_ref_normal = -1.0);

/// One integration substep: inject the phase jump, advance (theta, omega)
/// by RK4 with the mode frozen, clamp omega if bounded, then run the
/// automaton. u must be zero while the device is in Normal mode.
ApcState step(const ApcState& state, const ControlInput& u, const GridCondition& grid,
              const SystemParams& params, double dt, double v_ref,
              const PlantOptions& opts = {});

class Strategy; // controllers.hpp

struct SimOptions {
    double dt = 5e-4;   // plant substep, s
    double t_end = 4.0; // s
    double td = 0.02;   // controller decision interval, s
    PlantOptions plant;
};

/// Closed-loop run: strategy queried every td, fixed-substep integration
/// in between, grid switched by the scenario. Strategy failures are
/// recorded and the loop continues with zero corrective input.
TrajectoryRecord simulate(const ApcState& initial, const FaultScenario& scenario,
                          Strategy& strategy, const SystemParams& params,
                          const SimOptions& opts);

/// Normal-mode equilibrium state consistent with the grid and RPC model.
ApcState equilibrium_state(const GridCondition& grid, const SystemParams& params,
                           const RpcModel& rpc);

} // namespace gfmts

#endif
