#ifndef GFMTS_CONTROLLERS_HPP
#define GFMTS_CONTROLLERS_HPP

#include "gfmts/mpc.hpp"
#include "gfmts/plant.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gfmts {

/// Measurement snapshot handed to a strategy at each controller tick.
struct TickContext {
    ApcState state;
    GridCondition grid;    // live grid (measurement)
    bool fault_active = false;
    double v_ref = 1.01;   // commanded voltage at the tick
    const SystemParams* params = nullptr;
    double td = 0.02;
};

/// One corrective strategy behind the common controller abstraction.
/// Strategies other than the MPC adapter are stateless value objects.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::string_view name() const = 0;
    virtual ControlInput tick(const TickContext& ctx) = 0;
    /// Plant-level APC frequency clamp carried by this strategy, if any.
    virtual std::optional<double> omega_bound() const { return std::nullopt; }
    /// Solver diagnostics, when the strategy hosts the rolling MPC.
    virtual const std::vector<mpc::SolveLogRow>* solve_log() const { return nullptr; }
    virtual void reset() {}
};

/// No enhancement: always (0, 0).
std::unique_ptr<Strategy> make_original();

/// Strategy B: bounds the APC frequency to omega_0 +/- delta_omega_max;
/// corrective inputs stay (0, 0).
std::unique_ptr<Strategy> make_frequency_bound(double delta_omega_max);

/// Strategy C: subtracts the unsaturated/saturated power gap from the
/// reference power while current-saturated.
std::unique_ptr<Strategy> make_compensation();

/// CL0: full negative power-reference correction while saturated, no
/// phase jumps.
std::unique_ptr<Strategy> make_cl0(double delta_p_ref_max);

/// Rolling-horizon MPC adapter. believed_grid is the controller's grid
/// estimate (post-fault values, possibly mis-scaled for robustness
/// studies); omega_bound is the APC frequency clamp the strategy carries.
std::unique_ptr<Strategy> make_mpc(const mpc::MpcConfig& config,
                                   const GridCondition& believed_grid,
                                   const SystemParams& params, double v_ref,
                                   std::optional<double> omega_bound = std::nullopt);

using StrategyFactory = std::function<std::unique_ptr<Strategy>()>;

} // namespace gfmts

#endif
