#ifndef GFMTS_SCENARIO_HPP
#define GFMTS_SCENARIO_HPP

#include "gfmts/analysis.hpp"
#include "gfmts/controllers.hpp"
#include "gfmts/mpc.hpp"
#include "gfmts/plant.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gfmts {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One scenario file: system constants, fault schedule, strategy choice,
/// MPC settings and run controls. All angles radians, electrical
/// quantities per-unit, time seconds.
struct ScenarioConfig {
    SystemParams params;

    // [grid]
    double z_g = 0.3;
    double phi = kPi / 2.0;
    double v_g = 1.0;

    // [fault]
    double fault_v_g = 0.05;
    std::optional<double> fault_z_g;
    double t_fault_on = 0.1;
    double t_fault_clear = 0.55;

    // [strategy]
    std::string strategy = "mpc";
    double delta_omega_max = 0.0066; // freq_bound / mpc clamp
    double cl0_delta_p_max = 1.5;
    bool mpc_clamp_enabled = true;

    // [mpc]
    mpc::MpcConfig mpc;
    double z_estimate_scale = 1.0;

    // [run]
    double dt = 5e-4;
    double t_end = 4.0;
    double td = 0.02;
    bool hold_enabled = true;
    bool rpc_droop = false;
    unsigned seed = 1;

    // [doa]
    int doa_theta_points = 40;
    double doa_theta_min = 0.05;
    std::optional<double> doa_theta_max; // default: theta_zc - 0.01
    double doa_omega_hi = 0.05;
    double doa_tol = 1e-4;
    std::vector<double> doa_cl0_dp_list{0.3, 0.6, 0.9, 1.2, 1.5};

    // [sweep]
    std::vector<double> sweep_values;        // empty = per-kind defaults
    std::vector<std::string> sweep_strategies{"mpc", "freq_bound", "compensation", "original"};
    double cct_tol = 1e-3;

    // [output]
    std::string out_dir = ".";

    GridCondition pre_fault_grid() const;
    GridCondition fault_grid() const;
    GridCondition post_fault_grid() const;
    FaultScenario fault_scenario() const;
    SimOptions sim_options() const;
    analysis::SweepConfig sweep_config() const;
    StrategyFactory make_strategy() const;
    StrategyFactory make_strategy(const std::string& name) const;
    void validate() const;
};

ScenarioConfig default_config();
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<string>");
std::string config_defaults_text();

// --- CSV emission / parsing -------------------------------------------

std::string format_double(double v);

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record);
TrajectoryRecord parse_trajectory_csv(const std::string& path);

void write_solve_log_csv(const std::string& path, const std::vector<mpc::SolveLogRow>& rows);

struct CctRow {
    std::string strategy;
    double cct_s = 0.0;
};
void write_cct_csv(const std::string& path, const std::vector<CctRow>& rows);
std::vector<CctRow> parse_cct_csv(const std::string& path);

void write_cct_sweep_csv(const std::string& path, const std::vector<analysis::SweepRow>& rows);
std::vector<analysis::SweepRow> parse_cct_sweep_csv(const std::string& path);

void write_doa_csv(const std::string& path, const std::vector<analysis::DoaBoundary>& curves);
std::vector<analysis::DoaBoundary> parse_doa_csv(const std::string& path);

void write_sweep_csv(const std::string& path, const std::vector<analysis::SweepRow>& rows);

// --- Subcommand runners (shared by the C API and the CLI) --------------

struct SimulateOutcome {
    analysis::StabilityVerdict verdict;
    std::string summary;
    std::vector<std::string> files_written;
};
SimulateOutcome run_simulate(const ScenarioConfig& config, const std::string& out_dir);

std::string run_landmarks_text(const ScenarioConfig& config);

struct CctOutcome {
    std::vector<CctRow> rows;
    std::string summary;
};
CctOutcome run_cct(const ScenarioConfig& config, const std::vector<std::string>& strategies,
                   double tol, const std::string& out_dir);

struct DoaOutcome {
    std::vector<analysis::DoaBoundary> curves;
    std::string summary;
};
DoaOutcome run_doa(const ScenarioConfig& config, const std::string& strategy, int theta_points,
                   const std::string& out_dir);

struct SweepOutcome {
    std::vector<analysis::SweepRow> rows;
    std::string summary;
};
SweepOutcome run_sweep(const ScenarioConfig& config, const std::string& kind,
                       const std::string& out_dir);

} // namespace gfmts

#endif
