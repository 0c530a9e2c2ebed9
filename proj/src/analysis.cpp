#include "gfmts/analysis.hpp"

#include "gfmts/mpc.hpp"
#include "gfmts/phasor_core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace gfmts {
namespace analysis {

namespace {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 2;
    workers = std::min<std::size_t>(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

bool is_stable(Classification c) {
    return c == Classification::StableSafe || c == Classification::StableAfterCorrection;
}

double post_fault_v_ref(const RunSetup& setup) {
    const ApcState eq =
        equilibrium_state(setup.scenario.post_fault, setup.params, setup.options.plant.rpc);
    return setup.options.plant.rpc.v_ref(Mode::Normal, eq.theta, setup.scenario.post_fault,
                                         setup.params, 1.0);
}

FaultScenario with_duration(const FaultScenario& base, double duration, double t_end) {
    FaultScenario s = base;
    if (duration <= 0.0) {
        s.t_fault_on = t_end + 1.0; // fault never occurs
        s.t_fault_clear = t_end + 2.0;
    } else {
        s.t_fault_clear = s.t_fault_on + duration;
    }
    return s;
}

} // namespace

const char* to_string(Classification c) {
    switch (c) {
        case Classification::StableSafe: return "StableSafe";
        case Classification::StableAfterCorrection: return "StableAfterCorrection";
        case Classification::UnsafeUnstable: return "UnsafeUnstable";
        case Classification::Diverged: return "Diverged";
    }
    return "?";
}

Landmarks landmark_angles(const SystemParams& params, const GridCondition& grid,
                          double v_ref, double omega) {
    Landmarks lm;
    lm.theta_eq = mpc::equilibrium_angle(params, grid, v_ref);
    lm.theta_sat = theta_sat(v_ref, grid, params, omega);
    lm.theta_zc_sat = kPi / 2.0 - params.beta;
    lm.theta_ue_unsat = kPi - lm.theta_eq;

    const double c = params.c_f * params.omega_n * omega;
    const double denom = 1.0 - grid.x() * c;
    if (denom <= 0.0) throw ParameterError("1 - X*C*omega_n*omega must be positive");
    const double arg = params.p0 * denom / (params.i_s_max * grid.v_g);
    if (std::abs(arg) <= 1.0) {
        lm.theta_ue_sat = -params.beta + std::acos(arg);
    }
    return lm;
}

StabilityVerdict classify(const TrajectoryRecord& trajectory, const Landmarks& landmarks) {
    if (trajectory.samples.size() < 2) {
        throw IndeterminateError("trajectory too short to classify");
    }
    StabilityVerdict v;
    v.peak_theta = trajectory.peak_theta();

    // Chronological scan: the first guard crossed in time decides.
    for (const auto& s : trajectory.samples) {
        if (s.theta < -kPi || s.theta > 2.0 * kPi || std::abs(s.omega - 1.0) > 0.2) {
            v.classification = Classification::Diverged;
            return v;
        }
        if (s.theta > landmarks.theta_zc_sat) {
            v.classification = Classification::UnsafeUnstable;
            return v;
        }
    }

    // Find the earliest time from which the state stays settled.
    const auto settled = [&](const TrajectorySample& s) {
        return std::abs(s.theta - landmarks.theta_eq) < 0.01 && std::abs(s.omega - 1.0) < 1e-4;
    };
    const auto& ss = trajectory.samples;
    std::size_t i = ss.size();
    while (i > 0 && settled(ss[i - 1])) --i;
    if (i == ss.size()) {
        throw IndeterminateError("trajectory did not settle within the run");
    }
    v.settle_time = ss[i].time;
    const bool crossed_ue =
        landmarks.theta_ue_sat && v.peak_theta > *landmarks.theta_ue_sat;
    v.classification = crossed_ue ? Classification::StableAfterCorrection
                                  : Classification::StableSafe;
    return v;
}

StabilityVerdict run_and_classify(const RunSetup& setup) {
    const ApcState initial =
        equilibrium_state(setup.scenario.pre_fault, setup.params, setup.options.plant.rpc);
    auto strategy = setup.strategy();
    const TrajectoryRecord traj =
        simulate(initial, setup.scenario, *strategy, setup.params, setup.options);
    const Landmarks lm =
        landmark_angles(setup.params, setup.scenario.post_fault, post_fault_v_ref(setup));
    return classify(traj, lm);
}

double cct(const RunSetup& setup, double tol, double max_duration) {
    if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
    if (tol < setup.options.dt) {
        throw ParameterError("bisection tolerance below the plant step is meaningless");
    }

    const auto stable_at = [&](double duration) {
        RunSetup probe = setup;
        probe.scenario = with_duration(setup.scenario, duration, setup.options.t_end);
        try {
            return is_stable(run_and_classify(probe).classification);
        } catch (const IndeterminateError&) {
            return false; // conservative
        }
    };

    if (!stable_at(0.0)) {
        throw DegenerateCaseError("unstable even with no fault applied");
    }
    double lo = 0.0;
    double hi = std::min(0.1, max_duration);
    while (stable_at(hi)) {
        lo = hi;
        if (hi >= max_duration) return max_duration;
        hi = std::min(hi * 2.0, max_duration);
        if (hi == lo) return max_duration;
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (stable_at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

DoaBoundary doa_boundary(const StrategyFactory& strategy, const std::string& label,
                         const SystemParams& params, const GridCondition& grid,
                         const std::vector<double>& theta_grid, double omega_lo,
                         double omega_hi, const SimOptions& options, double tol) {
    for (std::size_t i = 1; i < theta_grid.size(); ++i) {
        if (!(theta_grid[i] > theta_grid[i - 1])) {
            throw ParameterError("theta grid must be strictly increasing");
        }
    }
    if (!(omega_lo < omega_hi)) throw ParameterError("omega bracket is inverted");

    FaultScenario quiet;
    quiet.pre_fault = quiet.fault = quiet.post_fault = grid;
    quiet.t_fault_on = options.t_end + 1.0;
    quiet.t_fault_clear = options.t_end + 2.0;

    const ApcState eq = equilibrium_state(grid, params, options.plant.rpc);
    const Landmarks lm = landmark_angles(
        params, grid,
        options.plant.rpc.v_ref(Mode::Normal, eq.theta, grid, params, 1.0));

    const auto stable_from = [&](double theta0, double d_omega) {
        ApcState init;
        init.theta = theta0;
        init.omega = 1.0 + d_omega;
        const double v0 = options.plant.rpc.v_ref(Mode::Normal, theta0, grid, params, init.omega);
        init.mode = Mode::Normal;
        if (options.plant.crs_enabled) {
            init.mode = mode_transition(init, grid, params, v0, options.plant.hold_enabled);
        }
        auto strat = strategy();
        try {
            const TrajectoryRecord traj = simulate(init, quiet, *strat, params, options);
            return is_stable(classify(traj, lm).classification);
        } catch (const IndeterminateError&) {
            return false;
        } catch (const IntegrationError&) {
            return false;
        }
    };

    DoaBoundary b;
    b.strategy_label = label;
    b.theta = theta_grid;
    b.delta_omega.assign(theta_grid.size(), std::nullopt);

    parallel_for(theta_grid.size(), [&](std::size_t i) {
        const double th = theta_grid[i];
        if (!stable_from(th, omega_lo)) return; // open below the bracket
        if (stable_from(th, omega_hi)) {
            b.delta_omega[i] = omega_hi; // boundary at or above the bracket top
            return;
        }
        double lo = omega_lo;
        double hi = omega_hi;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (stable_from(th, mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        b.delta_omega[i] = lo;
    });
    return b;
}

StrategyFactory strategy_factory(const std::string& name, const SweepConfig& config,
                                 const FaultScenario& scenario) {
    const SystemParams params = config.params;
    if (name == "original") return [] { return make_original(); };
    if (name == "freq_bound" || name == "b") {
        const double bound = config.freq_bound;
        return [bound] { return make_frequency_bound(bound); };
    }
    if (name == "compensation" || name == "c") return [] { return make_compensation(); };
    if (name == "cl0") {
        const double dp = config.cl0_delta_p_max;
        return [dp] { return make_cl0(dp); };
    }
    if (name == "mpc") {
        mpc::MpcConfig mc = config.mpc_config;
        mc.omega_bound = config.mpc_omega_bound;
        GridCondition believed = scenario.post_fault;
        believed.z *= config.z_estimate_scale;
        const double v_ref = params.v0;
        return [mc, believed, params, v_ref, bound = config.mpc_omega_bound] {
            return make_mpc(mc, believed, params, v_ref, bound);
        };
    }
    throw ParameterError("unknown strategy: " + name);
}

std::vector<SweepRow> sweep(SweepKind kind, const SweepConfig& config) {
    struct Cell {
        double param;
        std::string strategy;
    };
    std::vector<Cell> cells;
    const bool per_strategy = kind == SweepKind::FaultVoltage || kind == SweepKind::ReferencePower;
    for (double v : config.values) {
        if (per_strategy) {
            for (const auto& s : config.strategies) cells.push_back({v, s});
        } else {
            cells.push_back({v, "mpc"});
        }
    }

    std::vector<std::vector<SweepRow>> results(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
        const Cell& cell = cells[i];
        std::vector<SweepRow>& out = results[i];
        SweepRow base;
        base.param = cell.param;
        base.strategy = cell.strategy;
        try {
            SweepConfig cfg = config;
            FaultScenario scenario = config.scenario;
            switch (kind) {
                case SweepKind::FaultVoltage:
                    scenario.fault.v_g = cell.param;
                    break;
                case SweepKind::ReferencePower:
                    cfg.params.p0 = cell.param;
                    break;
                case SweepKind::Horizon:
                    cfg.mpc_config.horizon_t = cell.param;
                    break;
                case SweepKind::ImpedanceError:
                    cfg.z_estimate_scale = cell.param;
                    break;
            }
            RunSetup setup;
            setup.params = cfg.params;
            setup.scenario = scenario;
            setup.options = cfg.options;
            setup.strategy = strategy_factory(cell.strategy, cfg, scenario);

            if (kind == SweepKind::FaultVoltage || kind == SweepKind::ReferencePower) {
                SweepRow row = base;
                row.metric = "cct_s";
                row.value = cct(setup, cfg.cct_tol);
                out.push_back(std::move(row));
            } else {
                const StabilityVerdict v = run_and_classify(setup);
                SweepRow verdict = base;
                verdict.metric = "verdict";
                verdict.value = double(int(v.classification));
                verdict.text = to_string(v.classification);
                out.push_back(verdict);
                SweepRow peak = base;
                peak.metric = "peak_theta";
                peak.value = v.peak_theta;
                out.push_back(peak);
                if (v.settle_time) {
                    SweepRow st = base;
                    st.metric = "settle_time_s";
                    st.value = *v.settle_time;
                    out.push_back(st);
                }
            }
        } catch (const std::exception& e) {
            SweepRow row = base;
            row.metric = kind == SweepKind::FaultVoltage || kind == SweepKind::ReferencePower
                             ? "cct_s"
                             : "verdict";
            row.failed = true;
            row.error = e.what();
            out.push_back(std::move(row));
        }
    });

    std::vector<SweepRow> rows;
    for (auto& cell_rows : results) {
        for (auto& r : cell_rows) rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace analysis
} // namespace gfmts
