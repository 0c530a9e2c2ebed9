#include "gfmts/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gfmts {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

std::vector<double> parse_number_list(const std::string& v, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number(item, where));
    }
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

std::vector<std::string> parse_string_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

GridCondition ScenarioConfig::pre_fault_grid() const {
    return {v_g, z_g + params.x_tr, phi};
}

GridCondition ScenarioConfig::fault_grid() const {
    return {fault_v_g, (fault_z_g ? *fault_z_g : z_g) + params.x_tr, phi};
}

GridCondition ScenarioConfig::post_fault_grid() const { return pre_fault_grid(); }

FaultScenario ScenarioConfig::fault_scenario() const {
    FaultScenario s;
    s.pre_fault = pre_fault_grid();
    s.fault = fault_grid();
    s.post_fault = post_fault_grid();
    s.t_fault_on = t_fault_on;
    s.t_fault_clear = t_fault_clear;
    return s;
}

SimOptions ScenarioConfig::sim_options() const {
    SimOptions o;
    o.dt = dt;
    o.t_end = t_end;
    o.td = td;
    o.plant.hold_enabled = hold_enabled;
    o.plant.rpc.droop_enabled = rpc_droop;
    return o;
}

analysis::SweepConfig ScenarioConfig::sweep_config() const {
    analysis::SweepConfig c;
    c.params = params;
    c.scenario = fault_scenario();
    c.options = sim_options();
    c.values = sweep_values;
    c.strategies = sweep_strategies;
    c.cct_tol = cct_tol;
    c.mpc_config = mpc;
    c.mpc_omega_bound =
        mpc_clamp_enabled ? std::optional<double>(delta_omega_max) : std::nullopt;
    c.freq_bound = delta_omega_max;
    c.cl0_delta_p_max = cl0_delta_p_max;
    c.z_estimate_scale = z_estimate_scale;
    return c;
}

StrategyFactory ScenarioConfig::make_strategy() const { return make_strategy(strategy); }

StrategyFactory ScenarioConfig::make_strategy(const std::string& name) const {
    return analysis::strategy_factory(name, sweep_config(), fault_scenario());
}

void ScenarioConfig::validate() const {
    params.validate();
    pre_fault_grid().validate();
    fault_grid().validate();
    fault_scenario().validate();
    mpc.validate();
    if (!(dt > 0.0) || !(t_end > 0.0) || !(td > 0.0)) {
        throw ConfigError("[run] dt, td and t_end must be positive");
    }
    static const std::vector<std::string> known{"original", "freq_bound", "b",
                                                "compensation", "c", "cl0", "mpc"};
    if (std::find(known.begin(), known.end(), strategy) == known.end()) {
        throw ConfigError("[strategy] unknown kind '" + strategy + "'");
    }
    if (z_estimate_scale <= 0.0) throw ConfigError("[mpc] z_estimate_scale must be positive");
    if (strategy == "mpc" && std::abs(td - mpc.step_td) > 1e-12) {
        throw ConfigError("[run] td must equal [mpc] step_s for the rolling delay contract");
    }
}

ScenarioConfig default_config() {
    ScenarioConfig c;
    c.mpc.theta_zc = kPi / 2.0 - c.params.beta;
    return c;
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
    ScenarioConfig cfg = default_config();
    bool theta_zc_explicit = false;

    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            static const std::vector<std::string> sections{
                "system", "grid", "fault", "strategy", "mpc", "run", "doa", "sweep", "output"};
            if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
                throw ConfigError(where + ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(where + ": empty key or value");
        const auto num = [&] { return parse_number(value, where); };
        const auto flag = [&] { return parse_bool(value, where); };

        if (section == "system") {
            if (key == "s_base_mva") cfg.params.s_base = num() * 1e6;
            else if (key == "f_n_hz") cfg.params.omega_n = 2.0 * kPi * num();
            else if (key == "p0") cfg.params.p0 = num();
            else if (key == "q0") cfg.params.q0 = num();
            else if (key == "h") cfg.params.h = num();
            else if (key == "d_p") cfg.params.d_p = num();
            else if (key == "d_q") cfg.params.d_q = num();
            else if (key == "v0") cfg.params.v0 = num();
            else if (key == "i_s_max") cfg.params.i_s_max = num();
            else if (key == "beta") cfg.params.beta = num();
            else if (key == "c_f") cfg.params.c_f = num();
            else if (key == "x_tr") cfg.params.x_tr = num();
            else throw ConfigError(where + ": unknown key '" + key + "' in [system]");
        } else if (section == "grid") {
            if (key == "z_g") cfg.z_g = num();
            else if (key == "phi") cfg.phi = num();
            else if (key == "v_g") cfg.v_g = num();
            else throw ConfigError(where + ": unknown key '" + key + "' in [grid]");
        } else if (section == "fault") {
            if (key == "v_g") cfg.fault_v_g = num();
            else if (key == "z_g") cfg.fault_z_g = num();
            else if (key == "t_on") cfg.t_fault_on = num();
            else if (key == "t_clear") cfg.t_fault_clear = num();
            else throw ConfigError(where + ": unknown key '" + key + "' in [fault]");
        } else if (section == "strategy") {
            if (key == "kind") cfg.strategy = value;
            else if (key == "delta_omega_max") cfg.delta_omega_max = num();
            else if (key == "delta_p_ref_max") cfg.cl0_delta_p_max = num();
            else if (key == "mpc_clamp") cfg.mpc_clamp_enabled = flag();
            else throw ConfigError(where + ": unknown key '" + key + "' in [strategy]");
        } else if (section == "mpc") {
            if (key == "horizon_s") cfg.mpc.horizon_t = num();
            else if (key == "step_s") cfg.mpc.step_td = num();
            else if (key == "delta_p_ref_max") cfg.mpc.delta_p_ref_max = num();
            else if (key == "delta_theta_chg_max") cfg.mpc.delta_theta_chg_max = num();
            else if (key == "delta_theta_min") cfg.mpc.delta_theta_min = num();
            else if (key == "delta_theta_max") cfg.mpc.delta_theta_max = num();
            else if (key == "omega_min") cfg.mpc.omega_min = num();
            else if (key == "omega_max") cfg.mpc.omega_max = num();
            else if (key == "theta_zc") { cfg.mpc.theta_zc = num(); theta_zc_explicit = true; }
            else if (key == "big_m") cfg.mpc.big_m = num();
            else if (key == "inner_tol") cfg.mpc.inner_tol = num();
            else if (key == "inner_max_iter") cfg.mpc.inner_max_iter = int(num());
            else if (key == "z_estimate_scale") cfg.z_estimate_scale = num();
            else throw ConfigError(where + ": unknown key '" + key + "' in [mpc]");
        } else if (section == "run") {
            if (key == "dt") cfg.dt = num();
            else if (key == "t_end") cfg.t_end = num();
            else if (key == "td") cfg.td = num();
            else if (key == "hold_enabled") cfg.hold_enabled = flag();
            else if (key == "rpc_droop") cfg.rpc_droop = flag();
            else if (key == "seed") cfg.seed = unsigned(num());
            else throw ConfigError(where + ": unknown key '" + key + "' in [run]");
        } else if (section == "doa") {
            if (key == "theta_points") cfg.doa_theta_points = int(num());
            else if (key == "theta_min") cfg.doa_theta_min = num();
            else if (key == "theta_max") cfg.doa_theta_max = num();
            else if (key == "omega_hi") cfg.doa_omega_hi = num();
            else if (key == "tol") cfg.doa_tol = num();
            else if (key == "cl0_dp_list") cfg.doa_cl0_dp_list = parse_number_list(value, where);
            else throw ConfigError(where + ": unknown key '" + key + "' in [doa]");
        } else if (section == "sweep") {
            if (key == "values") cfg.sweep_values = parse_number_list(value, where);
            else if (key == "strategies") cfg.sweep_strategies = parse_string_list(value);
            else if (key == "cct_tol") cfg.cct_tol = num();
            else throw ConfigError(where + ": unknown key '" + key + "' in [sweep]");
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = value;
            else throw ConfigError(where + ": unknown key '" + key + "' in [output]");
        } else {
            throw ConfigError(where + ": key outside of any section");
        }
    }
    if (!theta_zc_explicit) cfg.mpc.theta_zc = kPi / 2.0 - cfg.params.beta;
    try {
        cfg.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string config_defaults_text() {
    std::ostringstream o;
    o << "# gfmts scenario configuration.\n"
      << "# Units: electrical quantities per-unit, angles radians, time seconds.\n"
      << "\n[system]\n"
      << "s_base_mva = 310.0       # nominal apparent power, MVA (informational)\n"
      << "f_n_hz = 60.0            # nominal frequency\n"
      << "p0 = 0.871               # reference active power\n"
      << "q0 = 0.0645              # reference reactive power\n"
      << "h = 2.0                  # virtual inertia\n"
      << "d_p = 0.03               # active droop coefficient\n"
      << "d_q = 0.1                # reactive droop coefficient\n"
      << "v0 = 1.01                # RPC set-point voltage\n"
      << "i_s_max = 1.2            # maximum inverter-side current\n"
      << "beta = -0.78539816339744831   # saturated-current angle (-pi/4)\n"
      << "c_f = 0.0                # filter capacitance (0 = neglected)\n"
      << "x_tr = 0.16              # transformer reactance\n"
      << "\n[grid]\n"
      << "z_g = 0.3                # Thevenin impedance; total Z = z_g + x_tr\n"
      << "phi = 1.5707963267948966 # impedance angle (pi/2 = lossless)\n"
      << "v_g = 1.0                # Thevenin voltage\n"
      << "\n[fault]\n"
      << "v_g = 0.05               # fault-on Thevenin voltage\n"
      << "t_on = 0.1\n"
      << "t_clear = 0.55\n"
      << "# z_g = 0.3              # optional fault-on impedance override\n"
      << "\n[strategy]\n"
      << "kind = mpc               # original | freq_bound | compensation | cl0 | mpc\n"
      << "delta_omega_max = 0.0066 # APC frequency bound (freq_bound, mpc)\n"
      << "delta_p_ref_max = 1.5    # CL0 corrective power magnitude\n"
      << "mpc_clamp = on           # carry the frequency bound under mpc\n"
      << "\n[mpc]\n"
      << "horizon_s = 0.2\n"
      << "step_s = 0.02\n"
      << "delta_p_ref_max = 1.5\n"
      << "delta_theta_chg_max = 0.15\n"
      << "delta_theta_min = -0.15\n"
      << "delta_theta_max = 0.15\n"
      << "omega_min = 0.99\n"
      << "omega_max = 1.02\n"
      << "big_m = 6.2831853071795865\n"
      << "inner_tol = 1e-06\n"
      << "inner_max_iter = 150\n"
      << "z_estimate_scale = 1.0   # controller impedance estimate / true value\n"
      << "\n[run]\n"
      << "dt = 0.0005\n"
      << "t_end = 4.0\n"
      << "td = 0.02\n"
      << "hold_enabled = on        # 95% saturation hold\n"
      << "rpc_droop = off          # algebraic reactive droop for v_ref\n"
      << "seed = 1\n"
      << "\n[doa]\n"
      << "theta_points = 40\n"
      << "theta_min = 0.05\n"
      << "omega_hi = 0.05\n"
      << "tol = 0.0001\n"
      << "cl0_dp_list = 0.3,0.6,0.9,1.2,1.5\n"
      << "\n[sweep]\n"
      << "strategies = mpc,freq_bound,compensation,original\n"
      << "cct_tol = 0.001\n"
      << "\n[output]\n"
      << "dir = .\n";
    return o.str();
}

// --- CSV ----------------------------------------------------------------

namespace {

std::ofstream open_out(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    return f;
}

} // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record) {
    std::ofstream out = open_out(path);
    out << "time,theta,omega,mode,p_out,v_d,v_q,delta_p_ref,delta_theta_c\n";
    for (const auto& s : record.samples) {
        out << format_double(s.time) << ',' << format_double(s.theta) << ','
            << format_double(s.omega) << ',' << int(s.mode) << ','
            << format_double(s.p_out) << ',' << format_double(s.v_d) << ','
            << format_double(s.v_q) << ',' << format_double(s.delta_p_ref) << ','
            << format_double(s.delta_theta_c) << '\n';
    }
}

TrajectoryRecord parse_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    TrajectoryRecord rec;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
    if (line != "time,theta,omega,mode,p_out,v_d,v_q,delta_p_ref,delta_theta_c") {
        throw std::runtime_error("unexpected trajectory header in " + path);
    }
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 9) throw std::runtime_error("bad trajectory row in " + path);
        TrajectorySample s;
        s.time = std::stod(f[0]);
        s.theta = std::stod(f[1]);
        s.omega = std::stod(f[2]);
        s.mode = std::stoi(f[3]) == 0 ? Mode::Saturated : Mode::Normal;
        s.p_out = std::stod(f[4]);
        s.v_d = std::stod(f[5]);
        s.v_q = std::stod(f[6]);
        s.delta_p_ref = std::stod(f[7]);
        s.delta_theta_c = std::stod(f[8]);
        rec.samples.push_back(s);
    }
    if (rec.samples.size() >= 2) rec.dt = rec.samples[1].time - rec.samples[0].time;
    return rec;
}

void write_solve_log_csv(const std::string& path, const std::vector<mpc::SolveLogRow>& rows) {
    std::ofstream out = open_out(path);
    out << "tick,switch_step,objective,feasible,iterations,residual\n";
    for (const auto& r : rows) {
        out << r.tick << ',' << r.switch_step << ',' << format_double(r.objective) << ','
            << (r.feasible ? 1 : 0) << ',' << r.iterations << ',' << format_double(r.residual)
            << '\n';
    }
}

void write_cct_csv(const std::string& path, const std::vector<CctRow>& rows) {
    std::ofstream out = open_out(path);
    out << "strategy,cct_s\n";
    for (const auto& r : rows) out << r.strategy << ',' << format_double(r.cct_s) << '\n';
}

std::vector<CctRow> parse_cct_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "strategy,cct_s") {
        throw std::runtime_error("unexpected cct header in " + path);
    }
    std::vector<CctRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 2) throw std::runtime_error("bad cct row in " + path);
        rows.push_back({f[0], std::stod(f[1])});
    }
    return rows;
}

void write_cct_sweep_csv(const std::string& path, const std::vector<analysis::SweepRow>& rows) {
    std::ofstream out = open_out(path);
    out << "param,strategy,cct_s\n";
    for (const auto& r : rows) {
        if (r.metric != "cct_s") continue;
        out << format_double(r.param) << ',' << r.strategy << ','
            << (r.failed ? "nan" : format_double(r.value)) << '\n';
    }
}

std::vector<analysis::SweepRow> parse_cct_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "param,strategy,cct_s") {
        throw std::runtime_error("unexpected cct_sweep header in " + path);
    }
    std::vector<analysis::SweepRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 3) throw std::runtime_error("bad cct_sweep row in " + path);
        analysis::SweepRow r;
        r.param = std::stod(f[0]);
        r.strategy = f[1];
        r.metric = "cct_s";
        if (f[2] == "nan") {
            r.failed = true;
        } else {
            r.value = std::stod(f[2]);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_doa_csv(const std::string& path, const std::vector<analysis::DoaBoundary>& curves) {
    std::ofstream out = open_out(path);
    out << "strategy,theta,delta_omega_boundary\n";
    for (const auto& c : curves) {
        for (std::size_t i = 0; i < c.theta.size(); ++i) {
            out << c.strategy_label << ',' << format_double(c.theta[i]) << ','
                << (c.delta_omega[i] ? format_double(*c.delta_omega[i]) : std::string("nan"))
                << '\n';
        }
    }
}

std::vector<analysis::DoaBoundary> parse_doa_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "strategy,theta,delta_omega_boundary") {
        throw std::runtime_error("unexpected doa header in " + path);
    }
    std::vector<analysis::DoaBoundary> curves;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 3) throw std::runtime_error("bad doa row in " + path);
        if (curves.empty() || curves.back().strategy_label != f[0]) {
            curves.emplace_back();
            curves.back().strategy_label = f[0];
        }
        curves.back().theta.push_back(std::stod(f[1]));
        if (f[2] == "nan") {
            curves.back().delta_omega.push_back(std::nullopt);
        } else {
            curves.back().delta_omega.push_back(std::stod(f[2]));
        }
    }
    return curves;
}

void write_sweep_csv(const std::string& path, const std::vector<analysis::SweepRow>& rows) {
    std::ofstream out = open_out(path);
    out << "param,strategy,metric,value,text\n";
    for (const auto& r : rows) {
        out << format_double(r.param) << ',' << r.strategy << ',' << r.metric << ','
            << (r.failed ? "nan" : format_double(r.value)) << ','
            << (r.failed ? ("error: " + r.error) : r.text) << '\n';
    }
}

// --- Runners --------------------------------------------------------------

SimulateOutcome run_simulate(const ScenarioConfig& config, const std::string& out_dir) {
    config.validate();
    const FaultScenario scenario = config.fault_scenario();
    const SimOptions options = config.sim_options();
    const ApcState initial =
        equilibrium_state(scenario.pre_fault, config.params, options.plant.rpc);
    auto strategy = config.make_strategy()();
    const TrajectoryRecord traj =
        simulate(initial, scenario, *strategy, config.params, options);

    const analysis::Landmarks lm = analysis::landmark_angles(
        config.params, scenario.post_fault,
        options.plant.rpc.v_ref(Mode::Normal,
                                equilibrium_state(scenario.post_fault, config.params,
                                                  options.plant.rpc)
                                    .theta,
                                scenario.post_fault, config.params, 1.0));

    SimulateOutcome out;
    const std::filesystem::path dir(out_dir);
    const std::string traj_path = (dir / "trajectory.csv").string();
    write_trajectory_csv(traj_path, traj);
    out.files_written.push_back(traj_path);
    if (const auto* log = strategy->solve_log()) {
        const std::string log_path = (dir / "solve_log.csv").string();
        write_solve_log_csv(log_path, *log);
        out.files_written.push_back(log_path);
    }

    std::ostringstream s;
    try {
        out.verdict = analysis::classify(traj, lm);
        s << "verdict: " << analysis::to_string(out.verdict.classification)
          << "  peak_theta=" << format_double(out.verdict.peak_theta);
        if (out.verdict.settle_time) {
            s << "  settle_time_s=" << format_double(*out.verdict.settle_time);
        }
    } catch (const analysis::IndeterminateError& e) {
        out.verdict.classification = analysis::Classification::Diverged;
        out.verdict.peak_theta = traj.peak_theta();
        s << "verdict: Indeterminate (" << e.what() << ")";
    }
    s << "  transitions=" << traj.mode_transitions();
    for (const auto& ev : traj.events) s << "\nevent: " << ev;
    out.summary = s.str();
    return out;
}

std::string run_landmarks_text(const ScenarioConfig& config) {
    config.validate();
    std::ostringstream o;
    const GridCondition grid = config.post_fault_grid();
    o << "landmark angles (post-fault grid: v_g=" << format_double(grid.v_g)
      << " z=" << format_double(grid.z) << " x=" << format_double(grid.x()) << ")\n";
    try {
        const analysis::Landmarks lm =
            analysis::landmark_angles(config.params, grid, config.params.v0);
        o << "theta_eq       = " << format_double(lm.theta_eq)
          << "   # arcsin(P0 X / (Vg Vref))\n";
        o << "theta_sat      = " << format_double(lm.theta_sat)
          << "   # saturation threshold, acos of the criterion\n";
        if (lm.theta_ue_sat) {
            o << "theta_ue_sat   = " << format_double(*lm.theta_ue_sat)
              << "   # saturated-curve unstable equilibrium\n";
        } else {
            o << "theta_ue_sat   = absent   # P0 above the saturated power peak\n";
        }
        o << "theta_zc_sat   = " << format_double(lm.theta_zc_sat)
          << "   # zero-crossing bound pi/2 - beta\n";
        o << "theta_ue_unsat = " << format_double(lm.theta_ue_unsat)
          << "   # pi - theta_eq\n";
    } catch (const NoEquilibriumError&) {
        o << "theta_eq       = absent   # grid cannot carry the reference power\n";
        throw analysis::DegenerateCaseError(o.str());
    }
    return o.str();
}

CctOutcome run_cct(const ScenarioConfig& config, const std::vector<std::string>& strategies,
                   double tol, const std::string& out_dir) {
    config.validate();
    CctOutcome out;
    analysis::RunSetup setup;
    setup.params = config.params;
    setup.scenario = config.fault_scenario();
    setup.options = config.sim_options();

    for (const auto& name : strategies) {
        analysis::RunSetup s = setup;
        s.strategy = config.make_strategy(name);
        out.rows.push_back({name, analysis::cct(s, tol)});
    }
    const std::string path =
        (std::filesystem::path(out_dir) / "cct.csv").string();
    write_cct_csv(path, out.rows);
    std::ostringstream o;
    for (const auto& r : out.rows) o << r.strategy << ": cct=" << format_double(r.cct_s) << "s\n";
    out.summary = o.str();
    return out;
}

DoaOutcome run_doa(const ScenarioConfig& config, const std::string& strategy, int theta_points,
                   const std::string& out_dir) {
    config.validate();
    if (theta_points < 1) throw ConfigError("doa needs at least one theta sample");
    const GridCondition grid = config.post_fault_grid();
    const double theta_zc = kPi / 2.0 - config.params.beta;
    const double theta_max = config.doa_theta_max ? *config.doa_theta_max : theta_zc - 0.01;
    std::vector<double> thetas;
    if (theta_points == 1) {
        thetas.push_back(config.doa_theta_min);
    } else {
        for (int i = 0; i < theta_points; ++i) {
            thetas.push_back(config.doa_theta_min +
                             (theta_max - config.doa_theta_min) * double(i) /
                                 double(theta_points - 1));
        }
    }
    SimOptions options = config.sim_options();

    DoaOutcome out;
    const auto curve = [&](const StrategyFactory& f, const std::string& label,
                           bool crs_enabled) {
        SimOptions o = options;
        o.plant.crs_enabled = crs_enabled;
        out.curves.push_back(analysis::doa_boundary(f, label, config.params, grid, thetas, 0.0,
                                                    config.doa_omega_hi, o, config.doa_tol));
    };

    if (strategy == "cl0") {
        for (double dp : config.doa_cl0_dp_list) {
            ScenarioConfig c = config;
            c.cl0_delta_p_max = dp;
            curve(c.make_strategy("cl0"), "cl0_" + format_double(dp), true);
        }
    } else if (strategy == "original") {
        curve(config.make_strategy("original"), "original_sat", true);
        curve(config.make_strategy("original"), "original_unsat", false);
    } else {
        curve(config.make_strategy(strategy), strategy, true);
    }

    const std::string path = (std::filesystem::path(out_dir) / "doa.csv").string();
    write_doa_csv(path, out.curves);
    std::ostringstream o;
    o << out.curves.size() << " boundary curve(s) over " << thetas.size()
      << " theta samples written to " << path;
    out.summary = o.str();
    return out;
}

SweepOutcome run_sweep(const ScenarioConfig& config, const std::string& kind,
                       const std::string& out_dir) {
    config.validate();
    analysis::SweepConfig sc = config.sweep_config();
    analysis::SweepKind k;
    std::string csv_name;
    if (kind == "fault_voltage") {
        k = analysis::SweepKind::FaultVoltage;
        if (sc.values.empty()) sc.values = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
        csv_name = "cct_sweep.csv";
    } else if (kind == "reference_power") {
        k = analysis::SweepKind::ReferencePower;
        if (sc.values.empty()) sc.values = {0.4, 0.48, 0.56, 0.64, 0.72, 0.8};
        csv_name = "cct_sweep.csv";
    } else if (kind == "horizon") {
        k = analysis::SweepKind::Horizon;
        if (sc.values.empty()) sc.values = {0.12, 0.2, 0.3, 0.38};
        csv_name = "sweep.csv";
    } else if (kind == "impedance_error") {
        k = analysis::SweepKind::ImpedanceError;
        if (sc.values.empty()) sc.values = {0.9, 1.0, 1.1};
        csv_name = "sweep.csv";
    } else {
        throw ConfigError("unknown sweep kind: " + kind +
                          " (expected fault_voltage|reference_power|horizon|impedance_error)");
    }

    SweepOutcome out;
    out.rows = analysis::sweep(k, sc);
    const std::string path = (std::filesystem::path(out_dir) / csv_name).string();
    if (csv_name == "cct_sweep.csv") {
        write_cct_sweep_csv(path, out.rows);
    } else {
        write_sweep_csv(path, out.rows);
    }
    std::ostringstream o;
    int failures = 0;
    for (const auto& r : out.rows) failures += r.failed ? 1 : 0;
    o << out.rows.size() << " rows written to " << path;
    if (failures > 0) o << " (" << failures << " cell failure(s) recorded)";
    out.summary = o.str();
    return out;
}

} // namespace gfmts
