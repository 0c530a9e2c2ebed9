#include "gfmts/plant.hpp"

#include "gfmts/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace gfmts {

namespace {

constexpr double kOmega0 = 1.0;

struct Derivative {
    double d_theta;
    double d_omega;
};

Derivative swing_rhs(double theta, double omega, Mode mode, double delta_p_ref,
                     const GridCondition& grid, const SystemParams& params,
                     double v_ref) {
    const double p = mode == Mode::Normal
                         ? unsaturated_power(theta, v_ref, grid)
                         : saturated_power(theta, grid, params, omega);
    Derivative d;
    d.d_theta = params.omega_n * (omega - kOmega0);
    d.d_omega = (params.p0 + delta_p_ref - p - (omega - kOmega0) / params.d_p)
                / (2.0 * params.h);
    return d;
}

double terminal_q_saturated(double theta, const GridCondition& grid,
                            const SystemParams& params) {
    const DqVoltage vs = saturated_terminal_voltage(theta, grid, params);
    const double id = params.i_s_max * std::cos(params.beta);
    const double iq = params.i_s_max * std::sin(params.beta);
    return vs.q * id - vs.d * iq;
}

} // namespace

void FaultScenario::validate() const {
    pre_fault.validate();
    fault.validate();
    post_fault.validate();
    if (!(t_fault_on < t_fault_clear)) {
        throw ParameterError("fault must clear after it starts");
    }
}

int TrajectoryRecord::saturated_to_normal_transitions() const {
    int count = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i - 1].mode == Mode::Saturated && samples[i].mode == Mode::Normal) {
            ++count;
        }
    }
    return count;
}

int TrajectoryRecord::mode_transitions() const {
    int count = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i - 1].mode != samples[i].mode) ++count;
    }
    return count;
}

double TrajectoryRecord::peak_theta() const {
    double peak = -1e300;
    for (const auto& s : samples) peak = std::max(peak, s.theta);
    return peak;
}

double RpcModel::v_ref(Mode mode, double theta, const GridCondition& grid,
                       const SystemParams& params, double omega) const {
    (void)omega;
    if (!droop_enabled) return params.v0;
    const double bias = params.v0 + params.d_q * params.q0;
    if (mode == Mode::Saturated) {
        const double q = terminal_q_saturated(theta, grid, params);
        return std::max(1e-3, params.v0 + params.d_q * (params.q0 - q));
    }
    // Normal mode: v enters its own Q measurement, solve the quadratic
    // v^2 + v (X/D_q - V_g cos(theta)) - X (V_0 + D_q Q_0)/D_q = 0.
    const double x = grid.x();
    const double b = x / params.d_q - grid.v_g * std::cos(theta);
    const double c = -x * bias / params.d_q;
    const double disc = b * b - 4.0 * c;
    if (disc <= 0.0) return params.v0;
    return std::max(1e-3, 0.5 * (-b + std::sqrt(disc)));
}

double electrical_power(const ApcState& state, const GridCondition& grid,
                        const SystemParams& params, double v_ref) {
    return state.mode == Mode::Normal
               ? unsaturated_power(state.theta, v_ref, grid)
               : saturated_power(state.theta, grid, params, state.omega);
}

Mode mode_transition(const ApcState& state, const GridCondition& grid,
                     const SystemParams& params, double v_ref, bool hold_enabled,
                     double v_ref_release, double v_ref_normal) {
    if (v_ref_release <= 0.0) v_ref_release = v_ref;
    if (v_ref_normal <= 0.0) v_ref_normal = v_ref;
    const double cos_theta = std::cos(state.theta);

    if (state.mode == Mode::Normal) {
        const double r = saturation_rhs(v_ref, grid, params, state.omega);
        return cos_theta <= r ? Mode::Saturated : Mode::Normal;
    }

    // Saturated: release when the voltage controller would ask for a
    // feasible current again.
    const double i_mag =
        inverter_side_current(state.theta, v_ref_release, grid, params, state.omega)
            .magnitude();
    bool release = i_mag <= params.i_s_max;
    if (hold_enabled && release) {
        const double r_rel = saturation_rhs(v_ref_release, grid, params, state.omega);
        if (cos_theta < 0.95 * r_rel) release = false; // forced hold
        // Holding also rejects a release that would re-saturate immediately.
        const double r_norm = saturation_rhs(v_ref_normal, grid, params, state.omega);
        if (!(cos_theta > r_norm)) release = false;
    }
    return release ? Mode::Normal : Mode::Saturated;
}

ApcState step(const ApcState& state, const ControlInput& u, const GridCondition& grid,
              const SystemParams& params, double dt, double v_ref,
              const PlantOptions& opts) {
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    if (state.mode == Mode::Normal && !u.zero()) {
        throw DomainError("corrective input must be zero in Normal mode");
    }
    require_finite(u.delta_p_ref, "delta_p_ref");
    require_finite(u.delta_theta_c, "delta_theta_c");

    const double theta0 = state.theta + u.delta_theta_c; // discrete phase jump
    const double omega0 = state.omega;
    const Mode mode = state.mode;

    const auto f = [&](double th, double om) {
        return swing_rhs(th, om, mode, u.delta_p_ref, grid, params, v_ref);
    };
    ApcState next = state;
    try {
        const Derivative k1 = f(theta0, omega0);
        const Derivative k2 =
            f(theta0 + 0.5 * dt * k1.d_theta, omega0 + 0.5 * dt * k1.d_omega);
        const Derivative k3 =
            f(theta0 + 0.5 * dt * k2.d_theta, omega0 + 0.5 * dt * k2.d_omega);
        const Derivative k4 = f(theta0 + dt * k3.d_theta, omega0 + dt * k3.d_omega);
        next.theta =
            theta0 + dt / 6.0 * (k1.d_theta + 2.0 * (k2.d_theta + k3.d_theta) + k4.d_theta);
        next.omega =
            omega0 + dt / 6.0 * (k1.d_omega + 2.0 * (k2.d_omega + k3.d_omega) + k4.d_omega);
    } catch (const DomainError& e) {
        throw IntegrationError("integration failed at t=" + std::to_string(state.time) +
                               ": " + e.what());
    }
    next.time = state.time + dt;

    if (!std::isfinite(next.theta) || !std::isfinite(next.omega)) {
        throw IntegrationError("non-finite state at t=" + std::to_string(state.time) +
                               " theta=" + std::to_string(state.theta));
    }
    if (opts.omega_bound) {
        const double b = *opts.omega_bound;
        next.omega = std::clamp(next.omega, kOmega0 - b, kOmega0 + b);
    }
    if (opts.crs_enabled) {
        const double v_now =
            opts.rpc.droop_enabled ? opts.rpc.v_ref(mode, next.theta, grid, params, next.omega)
                                   : v_ref;
        const double v_norm =
            opts.rpc.droop_enabled
                ? opts.rpc.v_ref(Mode::Normal, next.theta, grid, params, next.omega)
                : v_ref;
        next.mode = mode_transition(next, grid, params, v_now, opts.hold_enabled, v_now, v_norm);
    } else {
        next.mode = Mode::Normal;
    }
    return next;
}

namespace {

TrajectorySample make_sample(const ApcState& state, const GridCondition& grid,
                             const SystemParams& params, double v_ref,
                             double applied_dp, double cum_jump) {
    TrajectorySample s;
    s.time = state.time;
    s.theta = state.theta;
    s.omega = state.omega;
    s.mode = state.mode;
    s.p_out = electrical_power(state, grid, params, v_ref);
    if (state.mode == Mode::Saturated) {
        const Phasor i_sat{params.i_s_max * std::cos(params.beta),
                           params.i_s_max * std::sin(params.beta)};
        const Phasor v =
            saturated_voltage_with_capacitor(state.theta, i_sat, grid, params, state.omega);
        s.v_d = v.re;
        s.v_q = v.im;
    } else {
        s.v_d = v_ref;
        s.v_q = 0.0;
    }
    s.delta_p_ref = applied_dp;
    s.delta_theta_c = cum_jump;
    return s;
}

} // namespace

TrajectoryRecord simulate(const ApcState& initial, const FaultScenario& scenario,
                          Strategy& strategy, const SystemParams& params,
                          const SimOptions& opts) {
    params.validate();
    scenario.validate();
    if (!(opts.dt > 0.0) || !(opts.t_end > 0.0)) {
        throw ParameterError("dt and t_end must be positive");
    }
    const double ratio = opts.td / opts.dt;
    const long steps_per_tick = std::lround(ratio);
    if (steps_per_tick < 1 || std::abs(ratio - double(steps_per_tick)) > 1e-9) {
        throw ParameterError("dt must divide the controller interval td");
    }

    PlantOptions plant = opts.plant;
    if (auto b = strategy.omega_bound()) plant.omega_bound = b;

    TrajectoryRecord rec;
    rec.dt = opts.dt;
    const long total_steps = std::lround(opts.t_end / opts.dt);
    rec.samples.reserve(std::size_t(total_steps) + 1);

    ApcState state = initial;
    state.time = 0.0;
    double applied_dp = 0.0;
    double cum_jump = 0.0;

    const auto v_now = [&](const ApcState& s, const GridCondition& g) {
        return plant.rpc.droop_enabled ? plant.rpc.v_ref(s.mode, s.theta, g, params, s.omega)
                                       : plant.rpc.v_ref(Mode::Normal, s.theta, g, params, s.omega);
    };

    rec.samples.push_back(make_sample(state, scenario.at(0.0), params,
                                      v_now(state, scenario.at(0.0)), 0.0, 0.0));

    for (long i = 0; i < total_steps; ++i) {
        const double t = double(i) * opts.dt;
        const GridCondition& grid = scenario.at(t);
        const double v_ref = v_now(state, grid);
        double jump = 0.0;

        if (i % steps_per_tick == 0) {
            TickContext ctx;
            ctx.state = state;
            ctx.grid = grid;
            ctx.fault_active = scenario.fault_active(t);
            ctx.v_ref = v_ref;
            ctx.params = &params;
            ctx.td = opts.td;
            ControlInput u;
            try {
                u = strategy.tick(ctx);
                require_finite(u.delta_p_ref, "strategy delta_p_ref");
                require_finite(u.delta_theta_c, "strategy delta_theta_c");
            } catch (const std::exception& e) {
                rec.events.push_back("t=" + std::to_string(t) + " strategy error: " + e.what());
                u = ControlInput{};
            }
            if (state.mode == Mode::Normal && !u.zero()) {
                rec.events.push_back("t=" + std::to_string(t) +
                                     " nonzero corrective input in Normal mode dropped");
                u = ControlInput{};
            }
            applied_dp = u.delta_p_ref;
            jump = u.delta_theta_c;
            cum_jump += jump;
        }

        ControlInput sub{state.mode == Mode::Normal ? 0.0 : applied_dp, jump};
        state = step(state, sub, grid, params, opts.dt, v_ref, plant);
        state.time = double(i + 1) * opts.dt;
        if (state.mode == Mode::Normal) applied_dp = 0.0; // corrections end with saturation

        const GridCondition& grid_after = scenario.at(state.time);
        rec.samples.push_back(make_sample(state, grid_after, params,
                                          v_now(state, grid_after), sub.delta_p_ref, cum_jump));
    }
    return rec;
}

ApcState equilibrium_state(const GridCondition& grid, const SystemParams& params,
                           const RpcModel& rpc) {
    grid.validate();
    params.validate();
    double theta = 0.0;
    double v = params.v0;
    for (int it = 0; it < 50; ++it) {
        v = rpc.v_ref(Mode::Normal, theta, grid, params, 1.0);
        const double arg = params.p0 * grid.x() / (grid.v_g * v);
        if (std::abs(arg) > 1.0) {
            throw NoEquilibriumError("grid cannot carry the reference power");
        }
        theta = std::asin(arg);
    }
    ApcState s;
    s.theta = theta;
    s.omega = 1.0;
    s.mode = Mode::Normal;
    s.time = 0.0;
    return s;
}

} // namespace gfmts
