#include <doctest.h>

#include "gfmts/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace gfmts;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("gfmts_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("defaults text parses back to the default configuration") {
    const ScenarioConfig parsed = parse_config(config_defaults_text());
    const ScenarioConfig def = default_config();
    CHECK(parsed.params.p0 == def.params.p0);
    CHECK(parsed.params.omega_n == def.params.omega_n);
    CHECK(parsed.params.beta == doctest::Approx(def.params.beta).epsilon(1e-15));
    CHECK(parsed.z_g == def.z_g);
    CHECK(parsed.fault_v_g == def.fault_v_g);
    CHECK(parsed.strategy == def.strategy);
    CHECK(parsed.mpc.horizon_t == def.mpc.horizon_t);
    CHECK(parsed.mpc.theta_zc == doctest::Approx(def.mpc.theta_zc).epsilon(1e-15));
    CHECK(parsed.dt == def.dt);
    CHECK(parsed.hold_enabled == def.hold_enabled);
}

TEST_CASE("table-one baseline values") {
    const ScenarioConfig c = default_config();
    CHECK(c.params.s_base == doctest::Approx(310e6));
    CHECK(c.params.p0 == 0.871);
    CHECK(c.params.q0 == 0.0645);
    CHECK(c.params.h == 2.0);
    CHECK(c.params.d_p == 0.03);
    CHECK(c.params.d_q == 0.1);
    CHECK(c.params.v0 == 1.01);
    CHECK(c.params.i_s_max == 1.2);
    CHECK(c.params.beta == doctest::Approx(-kPi / 4.0));
    CHECK(c.params.x_tr == 0.16);
    CHECK(c.params.omega_n == doctest::Approx(2.0 * kPi * 60.0));
    CHECK(c.pre_fault_grid().z == doctest::Approx(0.46));
}

TEST_CASE("config parse errors carry line-level diagnostics") {
    CHECK_THROWS_WITH_AS(parse_config("[system]\np0 == 1\n", "f.ini"),
                         doctest::Contains("f.ini:2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[system]\nbogus_key = 1\n", "f.ini"),
                         doctest::Contains("unknown key"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[nope]\n", "f.ini"),
                         doctest::Contains("unknown section"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("p0 = 1\n", "f.ini"),
                         doctest::Contains("outside of any section"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[system]\np0 = abc\n", "f.ini"),
                         doctest::Contains("expected a number"), ConfigError);
    CHECK_THROWS_AS(parse_config("[strategy]\nkind = voodoo\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[system]\nh = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[fault]\nt_on = 2\nt_clear = 1\n"), ConfigError);
    // The rolling controller's decision interval is the simulation tick.
    CHECK_THROWS_WITH_AS(parse_config("[run]\ntd = 0.01\n"),
                         doctest::Contains("step_s"), ConfigError);
    CHECK_NOTHROW(parse_config("[run]\ntd = 0.01\n[strategy]\nkind = original\n"));
}

TEST_CASE("scenario builders derive the grids and strategy") {
    ScenarioConfig c = default_config();
    c.z_g = 0.3;
    c.fault_v_g = 0.05;
    const FaultScenario s = c.fault_scenario();
    CHECK(s.pre_fault.v_g == 1.0);
    CHECK(s.pre_fault.z == doctest::Approx(0.46));
    CHECK(s.fault.v_g == 0.05);
    CHECK(s.post_fault.z == doctest::Approx(0.46));
    CHECK(s.fault_active(0.2));
    CHECK(!s.fault_active(0.56));

    c.strategy = "cl0";
    auto strat = c.make_strategy()();
    CHECK(strat->name() == "cl0");
    c.strategy = "freq_bound";
    CHECK(c.make_strategy()()->name() == "freq_bound");
}

TEST_CASE("theta_zc follows beta unless pinned explicitly") {
    const ScenarioConfig a = parse_config("[system]\nbeta = -0.5\n");
    CHECK(a.mpc.theta_zc == doctest::Approx(kPi / 2.0 + 0.5).epsilon(1e-14));
    const ScenarioConfig b = parse_config("[system]\nbeta = -0.5\n[mpc]\ntheta_zc = 2.0\n");
    CHECK(b.mpc.theta_zc == 2.0);
}

TEST_CASE("trajectory csv round-trips losslessly") {
    TempDir dir;
    ScenarioConfig c = default_config();
    c.strategy = "original";
    c.t_end = 0.5;
    const auto outcome = run_simulate(c, dir.path.string());
    const TrajectoryRecord back = parse_trajectory_csv(dir.file("trajectory.csv"));
    REQUIRE(back.samples.size() == std::size_t(std::lround(0.5 / c.dt)) + 1);

    // Re-serialize: byte-identical file (the %.17g round-trip).
    const std::string again = dir.file("again.csv");
    write_trajectory_csv(again, back);
    std::ifstream f1(dir.file("trajectory.csv")), f2(again);
    std::stringstream b1, b2;
    b1 << f1.rdbuf();
    b2 << f2.rdbuf();
    REQUIRE(b1.str() == b2.str());
    CHECK(outcome.verdict.classification == analysis::Classification::UnsafeUnstable);
}

TEST_CASE("identical configs produce byte-identical outputs") {
    TempDir d1, d2;
    ScenarioConfig c = default_config();
    c.strategy = "freq_bound";
    c.t_end = 1.0;
    run_simulate(c, d1.path.string());
    run_simulate(c, d2.path.string());
    std::ifstream f1(d1.file("trajectory.csv")), f2(d2.file("trajectory.csv"));
    std::stringstream b1, b2;
    b1 << f1.rdbuf();
    b2 << f2.rdbuf();
    CHECK(b1.str() == b2.str());
}

TEST_CASE("simulate with the mpc strategy emits the solver log") {
    TempDir dir;
    ScenarioConfig c = default_config();
    c.strategy = "mpc";
    c.t_end = 2.0;
    const auto outcome = run_simulate(c, dir.path.string());
    CHECK(std::filesystem::exists(dir.file("trajectory.csv")));
    REQUIRE(std::filesystem::exists(dir.file("solve_log.csv")));
    std::ifstream log(dir.file("solve_log.csv"));
    std::string header;
    std::getline(log, header);
    CHECK(header == "tick,switch_step,objective,feasible,iterations,residual");
    std::string row;
    int rows = 0;
    while (std::getline(log, row)) {
        if (!row.empty()) ++rows;
    }
    CHECK(rows > 0);
    CHECK(outcome.summary.find("verdict:") != std::string::npos);
}

TEST_CASE("cct csv round-trip and runner") {
    TempDir dir;
    ScenarioConfig c = default_config();
    c.t_end = 3.6;
    c.cct_tol = 2e-3;
    const auto outcome = run_cct(c, {"freq_bound", "original"}, 2e-3, dir.path.string());
    REQUIRE(outcome.rows.size() == 2);
    CHECK(outcome.rows[0].strategy == "freq_bound");
    CHECK(outcome.rows[0].cct_s > outcome.rows[1].cct_s);
    const auto back = parse_cct_csv(dir.file("cct.csv"));
    REQUIRE(back.size() == 2);
    CHECK(back[0].cct_s == outcome.rows[0].cct_s);
    CHECK(back[1].strategy == "original");
}

TEST_CASE("landmarks text names the five angles") {
    ScenarioConfig c = default_config();
    const std::string text = run_landmarks_text(c);
    CHECK(text.find("theta_eq") != std::string::npos);
    CHECK(text.find("theta_sat") != std::string::npos);
    CHECK(text.find("theta_ue_sat") != std::string::npos);
    CHECK(text.find("theta_zc_sat") != std::string::npos);
    CHECK(text.find("theta_ue_unsat") != std::string::npos);
    CHECK(text.find("0.4079") != std::string::npos);
    CHECK(text.find("2.3561944") != std::string::npos);

    // P0 = 0: equilibrium at zero.
    ScenarioConfig zero = c;
    zero.params.p0 = 0.0;
    const std::string t0 = run_landmarks_text(zero);
    CHECK(t0.find("theta_eq       = 0 ") != std::string::npos);

    // Degenerate grid: no equilibrium, explicit absence marker via error.
    ScenarioConfig heavy = c;
    heavy.z_g = 1.2; // P0 (z_g + x_tr) > Vg Vref
    CHECK_THROWS_AS(run_landmarks_text(heavy), analysis::DegenerateCaseError);
}

TEST_CASE("doa runner emits nested cl0 curves") {
    TempDir dir;
    ScenarioConfig c = default_config();
    c.t_end = 3.0;
    c.doa_cl0_dp_list = {0.3, 1.5};
    c.doa_tol = 5e-4;
    const auto outcome = run_doa(c, "cl0", 6, dir.path.string());
    REQUIRE(outcome.curves.size() == 2);
    REQUIRE(outcome.curves[0].theta.size() == 6);
    CHECK(std::filesystem::exists(dir.file("doa.csv")));
    std::ifstream f(dir.file("doa.csv"));
    std::string header;
    std::getline(f, header);
    CHECK(header == "strategy,theta,delta_omega_boundary");

    // Single-point grid contract.
    TempDir dir2;
    const auto one = run_doa(c, "original", 1, dir2.path.string());
    REQUIRE(one.curves.size() == 2); // saturated and unsaturated plant
    CHECK(one.curves[0].theta.size() == 1);
}

TEST_CASE("no-fault run classifies StableSafe with a flat trajectory") {
    TempDir dir;
    ScenarioConfig c = default_config();
    c.t_fault_on = 10.0; // beyond the run: the fault never happens
    c.t_fault_clear = 11.0;
    c.t_end = 2.0;
    const auto outcome = run_simulate(c, dir.path.string());
    CHECK(outcome.verdict.classification == analysis::Classification::StableSafe);
    const TrajectoryRecord traj = parse_trajectory_csv(dir.file("trajectory.csv"));
    const double theta0 = traj.samples.front().theta;
    for (const auto& s : traj.samples) REQUIRE(std::abs(s.theta - theta0) < 1e-6);
}

TEST_CASE("horizon sweep reports per-horizon trajectory metrics") {
    TempDir dir;
    ScenarioConfig c = default_config();
    c.z_g = 0.7;
    c.t_end = 3.6;
    c.sweep_values = {0.2};
    const auto outcome = run_sweep(c, "horizon", dir.path.string());
    bool saw_verdict = false;
    for (const auto& r : outcome.rows) {
        if (r.metric == "verdict") {
            saw_verdict = true;
            CHECK(!r.failed);
            CHECK((r.text == "StableSafe" || r.text == "StableAfterCorrection"));
        }
    }
    CHECK(saw_verdict);
    CHECK(std::filesystem::exists(dir.file("sweep.csv")));
}

TEST_CASE("doa csv round-trips into boundary records") {
    TempDir dir;
    analysis::DoaBoundary b;
    b.strategy_label = "cl0_0.3";
    b.theta = {0.1, 0.2, 0.3};
    b.delta_omega = {0.011, std::nullopt, 0.05};
    analysis::DoaBoundary b2;
    b2.strategy_label = "cl0_1.5";
    b2.theta = {0.1};
    b2.delta_omega = {0.02};
    write_doa_csv(dir.file("doa.csv"), {b, b2});
    const auto back = parse_doa_csv(dir.file("doa.csv"));
    REQUIRE(back.size() == 2);
    REQUIRE(back[0].theta.size() == 3);
    CHECK(back[0].theta[1] == 0.2);
    CHECK(!back[0].delta_omega[1].has_value());
    CHECK(*back[0].delta_omega[2] == 0.05);
    CHECK(back[1].strategy_label == "cl0_1.5");
    CHECK(*back[1].delta_omega[0] == 0.02);
}

TEST_CASE("cct_sweep csv round-trips including failed cells") {
    TempDir dir;
    std::vector<analysis::SweepRow> rows(2);
    rows[0].param = 0.05;
    rows[0].strategy = "mpc";
    rows[0].metric = "cct_s";
    rows[0].value = 0.7594;
    rows[1].param = 0.1;
    rows[1].strategy = "original";
    rows[1].metric = "cct_s";
    rows[1].failed = true;
    write_cct_sweep_csv(dir.file("cct_sweep.csv"), rows);
    const auto back = parse_cct_sweep_csv(dir.file("cct_sweep.csv"));
    REQUIRE(back.size() == 2);
    CHECK(back[0].value == 0.7594);
    CHECK(back[0].strategy == "mpc");
    CHECK(back[1].failed);
}

TEST_CASE("sweep runner writes the pinned cct_sweep schema") {
    TempDir dir;
    ScenarioConfig c = default_config();
    c.t_end = 3.6;
    c.sweep_values = {0.05, 0.2};
    c.sweep_strategies = {"original"};
    c.cct_tol = 2e-3;
    const auto outcome = run_sweep(c, "fault_voltage", dir.path.string());
    CHECK(outcome.rows.size() == 2);
    std::ifstream f(dir.file("cct_sweep.csv"));
    std::string header;
    std::getline(f, header);
    CHECK(header == "param,strategy,cct_s");
    CHECK_THROWS_AS(run_sweep(c, "bogus", dir.path.string()), ConfigError);
}
