#include <doctest.h>

#include <gfmts/gfmts.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("gfmts_capi_" + std::to_string(::getpid()) + "_" +
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

} // namespace

TEST_CASE("version and status names") {
    CHECK(gfmts_version() != nullptr);
    CHECK(std::strcmp(gfmts_status_name(GFMTS_OK), "ok") == 0);
    CHECK(std::strcmp(gfmts_status_name(GFMTS_ERR_CONFIG), "config error") == 0);
}

TEST_CASE("defaults text is exposed and parseable") {
    const size_t need = gfmts_config_defaults_text(nullptr, 0);
    REQUIRE(need > 100);
    std::string buf(need + 1, '\0');
    gfmts_config_defaults_text(buf.data(), buf.size());
    buf.resize(std::strlen(buf.c_str()));
    gfmts_config* cfg = nullptr;
    char err[256] = {0};
    REQUIRE(gfmts_config_parse(buf.c_str(), &cfg, err, sizeof(err)) == GFMTS_OK);
    gfmts_config_free(cfg);
}

TEST_CASE("config load reports errors with diagnostics") {
    TempDir dir;
    const std::string bad = (dir.path / "bad.ini").string();
    {
        std::ofstream f(bad);
        f << "[system]\np0 = oops\n";
    }
    gfmts_config* cfg = nullptr;
    char err[512] = {0};
    CHECK(gfmts_config_load(bad.c_str(), &cfg, err, sizeof(err)) == GFMTS_ERR_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(std::string(err).find("expected a number") != std::string::npos);
    CHECK(gfmts_config_load((dir.path / "missing.ini").string().c_str(), &cfg, err,
                            sizeof(err)) == GFMTS_ERR_CONFIG);
    CHECK(gfmts_config_load(nullptr, &cfg, err, sizeof(err)) == GFMTS_ERR_BAD_ARG);
}

TEST_CASE("simulate through the shared surface") {
    TempDir dir;
    gfmts_config* cfg = nullptr;
    char err[512] = {0};
    const char* text = "[strategy]\nkind = freq_bound\n[run]\nt_end = 1.0\n";
    REQUIRE(gfmts_config_parse(text, &cfg, err, sizeof(err)) == GFMTS_OK);
    char summary[4096] = {0};
    const gfmts_status st =
        gfmts_run_simulate(cfg, dir.path.string().c_str(), summary, sizeof(summary));
    CHECK(st == GFMTS_OK);
    CHECK(std::string(summary).find("verdict:") != std::string::npos);
    CHECK(std::filesystem::exists(dir.path / "trajectory.csv"));
    gfmts_config_free(cfg);
}

TEST_CASE("landmarks and degenerate status mapping") {
    gfmts_config* cfg = nullptr;
    REQUIRE(gfmts_config_default(&cfg) == GFMTS_OK);
    char summary[4096] = {0};
    CHECK(gfmts_run_landmarks(cfg, summary, sizeof(summary)) == GFMTS_OK);
    CHECK(std::string(summary).find("theta_zc_sat") != std::string::npos);
    gfmts_config_free(cfg);

    char err[256] = {0};
    const char* heavy = "[grid]\nz_g = 1.2\n"; // no post-fault equilibrium
    REQUIRE(gfmts_config_parse(heavy, &cfg, err, sizeof(err)) == GFMTS_OK);
    CHECK(gfmts_run_landmarks(cfg, summary, sizeof(summary)) == GFMTS_ERR_DEGENERATE);
    gfmts_config_free(cfg);
}

TEST_CASE("cct through the shared surface") {
    TempDir dir;
    gfmts_config* cfg = nullptr;
    char err[256] = {0};
    const char* text = "[run]\nt_end = 3.6\n";
    REQUIRE(gfmts_config_parse(text, &cfg, err, sizeof(err)) == GFMTS_OK);
    char summary[4096] = {0};
    const gfmts_status st = gfmts_run_cct(cfg, "original", 2e-3,
                                          dir.path.string().c_str(), summary,
                                          sizeof(summary));
    CHECK(st == GFMTS_OK);
    CHECK(std::filesystem::exists(dir.path / "cct.csv"));
    CHECK(std::string(summary).find("original") != std::string::npos);
    gfmts_config_free(cfg);
}

TEST_CASE("bad arguments are rejected without crashing") {
    char summary[64];
    CHECK(gfmts_run_simulate(nullptr, ".", summary, sizeof(summary)) == GFMTS_ERR_BAD_ARG);
    gfmts_config* cfg = nullptr;
    REQUIRE(gfmts_config_default(&cfg) == GFMTS_OK);
    CHECK(gfmts_run_sweep(cfg, nullptr, ".", summary, sizeof(summary)) == GFMTS_ERR_BAD_ARG);
    gfmts_config_free(cfg);
}
