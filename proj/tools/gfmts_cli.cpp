// Command-line front end. Talks to the toolkit exclusively through the
// shared-library C API.

#include <gfmts/gfmts.h>

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace {

constexpr size_t kSummaryLen = 1 << 16;

struct ConfigDeleter {
    void operator()(gfmts_config* c) const { gfmts_config_free(c); }
};
using ConfigHandle = std::unique_ptr<gfmts_config, ConfigDeleter>;

int load(const std::string& path, ConfigHandle& out) {
    gfmts_config* raw = nullptr;
    char err[1024] = {0};
    const gfmts_status st = path.empty()
                                ? gfmts_config_default(&raw)
                                : gfmts_config_load(path.c_str(), &raw, err, sizeof(err));
    if (st != GFMTS_OK) {
        std::fprintf(stderr, "gfmts: %s: %s\n", gfmts_status_name(st), err);
        return int(st);
    }
    out.reset(raw);
    return 0;
}

int report(gfmts_status st, const char* summary) {
    if (summary && *summary) std::printf("%s\n", summary);
    if (st != GFMTS_OK) {
        std::fprintf(stderr, "gfmts: %s\n", gfmts_status_name(st));
    }
    return int(st);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid-forming inverter transient stability toolkit"};
    app.require_subcommand(0, 1);

    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults,
                 "Print the baseline scenario configuration and exit");

    std::string config_path;
    std::string out_dir = ".";
    std::string strategy;
    std::string tol_str;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Scenario configuration file");
        cmd->add_option("--out", out_dir, "Output directory for CSV files");
    };

    CLI::App* sim = app.add_subcommand("simulate", "Run one closed-loop scenario");
    add_common(sim);
    sim->add_option("--strategy", strategy, "Override the configured strategy");

    CLI::App* cct = app.add_subcommand("cct", "Critical clearing time per strategy");
    add_common(cct);
    cct->add_option("--strategy", strategy, "Comma-separated strategy list");
    cct->add_option("--tol", tol_str, "Bisection tolerance in seconds");

    CLI::App* doa = app.add_subcommand("doa", "Domain-of-attraction boundary");
    add_common(doa);
    doa->add_option("--strategy", strategy, "Strategy (cl0 sweeps its corrective levels)");
    int points = 0;
    doa->add_option("--points", points, "Theta grid resolution");

    CLI::App* sweep = app.add_subcommand("sweep", "Parameter sweeps");
    add_common(sweep);
    std::string kind;
    sweep->add_option("kind", kind,
                      "fault_voltage | reference_power | horizon | impedance_error")
        ->required();

    CLI::App* landmarks = app.add_subcommand("landmarks", "Print the landmark angles");
    add_common(landmarks);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : int(GFMTS_ERR_CONFIG);
    }

    if (print_defaults) {
        const size_t need = gfmts_config_defaults_text(nullptr, 0);
        std::string text(need + 1, '\0');
        gfmts_config_defaults_text(text.data(), text.size());
        std::fputs(text.c_str(), stdout);
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::fputs(app.help().c_str(), stdout);
        return 0;
    }

    ConfigHandle cfg;
    if (const int rc = load(config_path, cfg)) return rc;

    std::string summary(kSummaryLen, '\0');
    gfmts_status st = GFMTS_OK;

    if (sim->parsed()) {
        if (!strategy.empty()) {
            // Strategy override: re-parse with the key swapped in via the
            // C API's text path.
            const size_t need = gfmts_config_defaults_text(nullptr, 0);
            (void)need;
            std::string patch = "[strategy]\nkind = " + strategy + "\n";
            // Load original file text and append the override section.
            if (!config_path.empty()) {
                FILE* f = std::fopen(config_path.c_str(), "rb");
                if (!f) {
                    std::fprintf(stderr, "gfmts: cannot reopen %s\n", config_path.c_str());
                    return int(GFMTS_ERR_CONFIG);
                }
                std::string text;
                char buf[4096];
                size_t n;
                while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, n);
                std::fclose(f);
                text += "\n" + patch;
                gfmts_config* raw = nullptr;
                char err[1024] = {0};
                const gfmts_status pst = gfmts_config_parse(text.c_str(), &raw, err, sizeof(err));
                if (pst != GFMTS_OK) {
                    std::fprintf(stderr, "gfmts: %s: %s\n", gfmts_status_name(pst), err);
                    return int(pst);
                }
                cfg.reset(raw);
            } else {
                gfmts_config* raw = nullptr;
                char err[1024] = {0};
                const gfmts_status pst = gfmts_config_parse(patch.c_str(), &raw, err, sizeof(err));
                if (pst != GFMTS_OK) {
                    std::fprintf(stderr, "gfmts: %s: %s\n", gfmts_status_name(pst), err);
                    return int(pst);
                }
                cfg.reset(raw);
            }
        }
        st = gfmts_run_simulate(cfg.get(), out_dir.c_str(), summary.data(), summary.size());
    } else if (cct->parsed()) {
        const double tol = tol_str.empty() ? -1.0 : std::stod(tol_str);
        st = gfmts_run_cct(cfg.get(), strategy.empty() ? nullptr : strategy.c_str(), tol,
                           out_dir.c_str(), summary.data(), summary.size());
    } else if (doa->parsed()) {
        st = gfmts_run_doa(cfg.get(), strategy.empty() ? nullptr : strategy.c_str(), points,
                           out_dir.c_str(), summary.data(), summary.size());
    } else if (sweep->parsed()) {
        st = gfmts_run_sweep(cfg.get(), kind.c_str(), out_dir.c_str(), summary.data(),
                             summary.size());
    } else if (landmarks->parsed()) {
        st = gfmts_run_landmarks(cfg.get(), summary.data(), summary.size());
    }

    return report(st, summary.c_str());
}
