#ifndef GFMTS_ANALYSIS_HPP
#define GFMTS_ANALYSIS_HPP

#include "gfmts/controllers.hpp"
#include "gfmts/plant.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gfmts {
namespace analysis {

struct Landmarks {
    double theta_eq = 0.0;
    double theta_sat = 0.0;
    std::optional<double> theta_ue_sat; // absent when P0 exceeds the saturated peak
    double theta_zc_sat = 0.0;
    double theta_ue_unsat = 0.0;
};

Landmarks landmark_angles(const SystemParams& params, const GridCondition& grid,
                          double v_ref, double omega = 1.0);

enum class Classification {
    StableSafe,
    StableAfterCorrection,
    UnsafeUnstable,
    Diverged,
};

struct StabilityVerdict {
    Classification classification = Classification::Diverged;
    double peak_theta = 0.0;
    std::optional<double> settle_time; // s, present for stable outcomes
};

const char* to_string(Classification c);

/// Raised when a trajectory is too short to decide (still in transient
/// at the end of the record).
class IndeterminateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for degenerate analysis cases (e.g. unstable with no fault).
class DegenerateCaseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Settle criteria: |theta - theta_eq| < 0.01 rad and |omega - 1| < 1e-4
/// from the settle time onward.
StabilityVerdict classify(const TrajectoryRecord& trajectory, const Landmarks& landmarks);

struct RunSetup {
    SystemParams params;
    FaultScenario scenario;
    SimOptions options;
    StrategyFactory strategy;
};

/// Convenience wrapper: equilibrium start, closed-loop run, classify
/// against the post-fault landmarks.
StabilityVerdict run_and_classify(const RunSetup& setup);

/// Largest stable fault duration by bisection; tol is the final bracket
/// width. The setup's fault window supplies the fault-on time, duration
/// is swept.
double cct(const RunSetup& setup, double tol, double max_duration = 2.0);

struct DoaBoundary {
    std::string strategy_label;
    std::vector<double> theta;                         // strictly increasing
    std::vector<std::optional<double>> delta_omega;    // nullopt = open boundary
};

/// Post-fault autonomous domain-of-attraction boundary: for each initial
/// angle, bisect the initial frequency offset between stable and unstable
/// closed-loop outcomes.
DoaBoundary doa_boundary(const StrategyFactory& strategy, const std::string& label,
                         const SystemParams& params, const GridCondition& grid,
                         const std::vector<double>& theta_grid, double omega_lo,
                         double omega_hi, const SimOptions& options,
                         double tol = 1e-4);

enum class SweepKind {
    FaultVoltage,
    ReferencePower,
    Horizon,
    ImpedanceError,
};

struct SweepRow {
    double param = 0.0;
    std::string strategy;
    std::string metric;           // "cct_s", "verdict", "peak_theta", ...
    double value = 0.0;
    std::string text;             // verdict name for behavioral rows
    bool failed = false;          // cell failure recorded, sweep continued
    std::string error;
};

struct SweepConfig {
    SystemParams params;
    FaultScenario scenario;   // template; swept fields overwritten per cell
    SimOptions options;
    std::vector<double> values;                  // swept parameter values
    std::vector<std::string> strategies;         // strategy names to run
    double cct_tol = 1e-3;
    // MPC settings used when "mpc" is among the strategies.
    mpc::MpcConfig mpc_config;
    std::optional<double> mpc_omega_bound = 0.0066;
    double freq_bound = 0.0066;
    double cl0_delta_p_max = 1.5;
    double z_estimate_scale = 1.0;
};

std::vector<SweepRow> sweep(SweepKind kind, const SweepConfig& config);

/// Builds the named strategy for a given scenario (post-fault grid feeds
/// the MPC belief, scaled by z_estimate_scale).
StrategyFactory strategy_factory(const std::string& name, const SweepConfig& config,
                                 const FaultScenario& scenario);

} // namespace analysis
} // namespace gfmts

#endif
