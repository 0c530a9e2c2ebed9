// Exercises the installed CLI binary: exit-code contract and file outputs.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace {

std::string g_cli;

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("gfmts_cli_" + std::to_string(::getpid()) + "_" +
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
};

int run(const std::string& args, const std::string& capture_to = "/dev/null") {
    const std::string cmd = g_cli + " " + args + " > " + capture_to + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return s;
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[argc - 1];
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv);
    return ctx.run();
}

TEST_CASE("print-defaults emits a reusable baseline") {
    TempDir dir;
    const auto out = dir.path / "defaults.ini";
    REQUIRE(run("--print-defaults", out.string()) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("[system]") != std::string::npos);
    CHECK(text.find("p0 = 0.871") != std::string::npos);

    // The dumped baseline must load back.
    TempDir outdir;
    REQUIRE(run("landmarks --config " + out.string()) == 0);
}

TEST_CASE("landmarks prints the angle table") {
    TempDir dir;
    const auto out = dir.path / "lm.txt";
    REQUIRE(run("landmarks", out.string()) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("theta_eq") != std::string::npos);
    CHECK(text.find("theta_zc_sat") != std::string::npos);
}

TEST_CASE("simulate writes the trajectory and prints a verdict") {
    TempDir dir;
    write_file(dir.path / "cfg.ini",
               "[strategy]\nkind = original\n[run]\nt_end = 1.5\n");
    const auto out = dir.path / "out.txt";
    REQUIRE(run("simulate --config " + (dir.path / "cfg.ini").string() + " --out " +
                    dir.path.string(),
                out.string()) == 0);
    CHECK(std::filesystem::exists(dir.path / "trajectory.csv"));
    CHECK(slurp(out).find("verdict: UnsafeUnstable") != std::string::npos);
}

TEST_CASE("exit code contract") {
    TempDir dir;
    // 2: malformed config.
    write_file(dir.path / "bad.ini", "[system]\np0 = x\n");
    CHECK(run("simulate --config " + (dir.path / "bad.ini").string()) == 2);
    // 2: unknown flag (usage errors map to the config class).
    CHECK(run("simulate --bogus-flag") == 2);
    // 3: simulation failure (stiff blow-up to non-finite state).
    write_file(dir.path / "stiff.ini",
               "[system]\nh = 0.001\n[strategy]\nkind = original\n[run]\ndt = 0.02\nt_end "
               "= 1.0\n");
    CHECK(run("simulate --config " + (dir.path / "stiff.ini").string() + " --out " +
              dir.path.string()) == 3);
    // 4: degenerate analysis (grid cannot carry the reference power).
    write_file(dir.path / "heavy.ini", "[grid]\nz_g = 1.2\n");
    CHECK(run("landmarks --config " + (dir.path / "heavy.ini").string()) == 4);
    // 0: help.
    CHECK(run("--help") == 0);
}

TEST_CASE("simulate honors the strategy override flag") {
    TempDir dir;
    write_file(dir.path / "cfg.ini", "[run]\nt_end = 1.5\n"); // defaults to mpc
    const auto out = dir.path / "out.txt";
    REQUIRE(run("simulate --config " + (dir.path / "cfg.ini").string() +
                    " --strategy original --out " + dir.path.string(),
                out.string()) == 0);
    CHECK(slurp(out).find("verdict: UnsafeUnstable") != std::string::npos);
    // The override must not leave an mpc solver log behind.
    CHECK(!std::filesystem::exists(dir.path / "solve_log.csv"));
}

TEST_CASE("doa and sweep subcommands emit their CSVs") {
    TempDir dir;
    write_file(dir.path / "cfg.ini",
               "[run]\nt_end = 3.0\n[doa]\ntheta_min = 0.3\ntol = 0.001\n"
               "[sweep]\nvalues = 1.0\n");
    REQUIRE(run("doa --config " + (dir.path / "cfg.ini").string() +
                " --strategy original --points 2 --out " + dir.path.string()) == 0);
    CHECK(slurp(dir.path / "doa.csv").find("strategy,theta,delta_omega_boundary") == 0);

    REQUIRE(run("sweep impedance_error --config " + (dir.path / "cfg.ini").string() +
                " --out " + dir.path.string()) == 0);
    CHECK(slurp(dir.path / "sweep.csv").find("param,strategy,metric,value") == 0);
}

TEST_CASE("cct subcommand honors tolerance and strategy list") {
    TempDir dir;
    write_file(dir.path / "cfg.ini", "[run]\nt_end = 3.6\n");
    const auto out = dir.path / "out.txt";
    REQUIRE(run("cct --config " + (dir.path / "cfg.ini").string() +
                    " --strategy original --tol 0.002 --out " + dir.path.string(),
                out.string()) == 0);
    const std::string csv = slurp(dir.path / "cct.csv");
    CHECK(csv.find("strategy,cct_s") != std::string::npos);
    CHECK(csv.find("original,") != std::string::npos);
}
