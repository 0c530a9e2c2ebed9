#ifndef GFMTS_MPC_HPP
#define GFMTS_MPC_HPP

#include "gfmts/plant.hpp"
#include "gfmts/types.hpp"

#include <optional>
#include <vector>

namespace gfmts {
namespace mpc {

struct MpcConfig {
    double horizon_t = 0.2;            // s
    double step_td = 0.02;             // s
    double delta_p_ref_max = 1.5;      // p.u.
    double delta_theta_chg_max = 0.15; // rad per step, jump magnitude
    double delta_theta_min = -0.15;    // rad per step, total angle change
    double delta_theta_max = 0.15;
    double omega_min = 0.99;  // p.u.
    double omega_max = 1.02;  // p.u.
    double theta_zc = 0.75 * kPi; // rad, zero-crossing bound
    double big_m = 2.0 * kPi;
    double inner_tol = 1e-6;
    int inner_max_iter = 150;
    // APC frequency clamp mirrored into the prediction model so the plan
    // matches the plant it controls.
    std::optional<double> omega_bound;

    int horizon_steps() const;
    void validate() const;
};

struct MpcProblem {
    double theta0 = 0.0;
    double omega0 = 1.0;
    double delta_theta_c0 = 0.0; // cumulative corrective phase in force
    double delta_p_ref0 = 0.0;   // power correction applied during step 0
    GridCondition grid;          // frozen snapshot (controller's belief)
    SystemParams params;
    double v_ref = 1.01;
    MpcConfig config;
};

/// Fixed data of the horizon program after freezing the grid snapshot.
struct Transcription {
    int k = 0;
    double theta_sat = 0.0;
    double theta_eq = 0.0;
    double p_unsat_gain = 0.0; // V_g v_ref / X
    double p_sat_gain = 0.0;   // I_s_max V_g / (1 - X C w_n w)
    double beta = 0.0;

    int binary_count() const { return k; }
    int control_count() const { return 2 * k; }
    int state_value_count() const { return 2 * (k + 1); }
};

enum class SolveStatus {
    Optimal,
    Infeasible,    // every switch-step branch infeasible
    UnsafeStart,   // theta0 beyond the safe region by more than 0.01 rad
    IterationCap,  // best found under the iteration budget
};

struct MpcSolution {
    std::vector<double> theta;         // K+1
    std::vector<double> omega;         // K+1
    std::vector<int> n;                // K, nondecreasing
    std::vector<double> delta_p_ref;   // K
    std::vector<double> delta_theta_c; // K+1, cumulative
    double objective = 0.0;
    int switch_step = 0; // first step operating in Normal mode (K = never)
    SolveStatus status = SolveStatus::Infeasible;
    int iterations = 0;
    double residual = 0.0; // max constraint violation of the returned point
    bool start_clamped = false;
};

/// Post-fault equilibrium angle arcsin(P0 X / (Vg Vref)).
double equilibrium_angle(const SystemParams& params, const GridCondition& grid,
                         double v_ref);

Transcription transcribe(const MpcProblem& problem);

/// Whether the big-M pair admits the binary value n at the given angle.
bool big_m_admits(int n, double theta, double theta_sat, double big_m);

/// Exact branch layer over the single 0->1 switch step; smooth inner
/// solves by direct shooting. warm_* optionally seed from the previous
/// rolling solution (already shifted by the caller).
MpcSolution solve(const MpcProblem& problem,
                  const std::vector<double>* warm_p = nullptr,
                  const std::vector<double>* warm_d = nullptr);

struct SolveLogRow {
    long tick = 0;
    int switch_step = 0;
    double objective = 0.0;
    bool feasible = false;
    int iterations = 0;
    double residual = 0.0;
};

/// Rolling interface with the one-step computation delay: each call
/// returns the input decided by the previous solve and launches the next
/// one from the latest measurement.
class RollingMpc {
public:
    RollingMpc(const MpcConfig& config, const GridCondition& believed_grid,
               const SystemParams& params, double v_ref);

    /// Called every controller tick while the device is in post-fault
    /// current saturation.
    ControlInput tick(const ApcState& measured);

    /// Called when the device is not under MPC control (normal mode or
    /// fault-on); freezes the corrective phase and clears pending inputs.
    void idle();

    void reset();

    double cumulative_delta_theta_c() const { return cum_delta_theta_c_; }
    const std::vector<SolveLogRow>& log() const { return log_; }
    const MpcConfig& config() const { return config_; }

private:
    MpcConfig config_;
    GridCondition grid_;
    SystemParams params_;
    double v_ref_;
    ControlInput pending_{};
    bool active_ = false;
    double cum_delta_theta_c_ = 0.0;
    long tick_count_ = 0;
    std::vector<double> warm_p_;
    std::vector<double> warm_d_;
    bool have_warm_ = false;
    std::vector<SolveLogRow> log_;
};

} // namespace mpc
} // namespace gfmts

#endif
