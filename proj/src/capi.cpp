#include "gfmts/gfmts.h"

#include "gfmts/analysis.hpp"
#include "gfmts/scenario.hpp"

#include <cstring>
#include <string>

using namespace gfmts;

struct gfmts_config {
    ScenarioConfig cfg;
};

namespace {

void fill(char* buf, size_t len, const std::string& text) {
    if (!buf || len == 0) return;
    const size_t n = std::min(text.size(), len - 1);
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
}

gfmts_status classify_exception(const std::exception& e, char* buf, size_t len) {
    fill(buf, len, e.what());
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
        dynamic_cast<const DomainError*>(&e)) {
        return GFMTS_ERR_CONFIG;
    }
    if (dynamic_cast<const analysis::DegenerateCaseError*>(&e) ||
        dynamic_cast<const NoEquilibriumError*>(&e)) {
        return GFMTS_ERR_DEGENERATE;
    }
    return GFMTS_ERR_SIM;
}

template <typename Fn>
gfmts_status guarded(char* summary, size_t summarylen, Fn&& fn) {
    try {
        fill(summary, summarylen, fn());
        return GFMTS_OK;
    } catch (const std::exception& e) {
        return classify_exception(e, summary, summarylen);
    } catch (...) {
        fill(summary, summarylen, "unknown error");
        return GFMTS_ERR_SIM;
    }
}

} // namespace

extern "C" {

const char* gfmts_version(void) { return "1.0.0"; }

const char* gfmts_status_name(gfmts_status status) {
    switch (status) {
        case GFMTS_OK: return "ok";
        case GFMTS_ERR_CONFIG: return "config error";
        case GFMTS_ERR_SIM: return "simulation error";
        case GFMTS_ERR_DEGENERATE: return "degenerate analysis case";
        case GFMTS_ERR_BAD_ARG: return "bad argument";
    }
    return "unknown";
}

gfmts_status gfmts_config_load(const char* path, gfmts_config** out, char* errbuf,
                               size_t errlen) {
    if (!path || !out) return GFMTS_ERR_BAD_ARG;
    *out = nullptr;
    try {
        auto* handle = new gfmts_config{load_config(path)};
        *out = handle;
        return GFMTS_OK;
    } catch (const std::exception& e) {
        return classify_exception(e, errbuf, errlen);
    }
}

gfmts_status gfmts_config_parse(const char* text, gfmts_config** out, char* errbuf,
                                size_t errlen) {
    if (!text || !out) return GFMTS_ERR_BAD_ARG;
    *out = nullptr;
    try {
        auto* handle = new gfmts_config{parse_config(text)};
        *out = handle;
        return GFMTS_OK;
    } catch (const std::exception& e) {
        return classify_exception(e, errbuf, errlen);
    }
}

gfmts_status gfmts_config_default(gfmts_config** out) {
    if (!out) return GFMTS_ERR_BAD_ARG;
    *out = new gfmts_config{default_config()};
    return GFMTS_OK;
}

void gfmts_config_free(gfmts_config* config) { delete config; }

size_t gfmts_config_defaults_text(char* buf, size_t buflen) {
    const std::string text = config_defaults_text();
    fill(buf, buflen, text);
    return text.size();
}

gfmts_status gfmts_run_simulate(const gfmts_config* config, const char* out_dir, char* summary,
                                size_t summarylen) {
    if (!config || !out_dir) return GFMTS_ERR_BAD_ARG;
    return guarded(summary, summarylen,
                   [&] { return run_simulate(config->cfg, out_dir).summary; });
}

gfmts_status gfmts_run_landmarks(const gfmts_config* config, char* summary, size_t summarylen) {
    if (!config) return GFMTS_ERR_BAD_ARG;
    return guarded(summary, summarylen, [&] { return run_landmarks_text(config->cfg); });
}

gfmts_status gfmts_run_cct(const gfmts_config* config, const char* strategies, double tol_s,
                           const char* out_dir, char* summary, size_t summarylen) {
    if (!config || !out_dir) return GFMTS_ERR_BAD_ARG;
    return guarded(summary, summarylen, [&] {
        std::vector<std::string> names;
        std::string list = strategies ? strategies : "";
        if (list.empty()) list = config->cfg.strategy;
        std::size_t start = 0;
        while (start <= list.size()) {
            const auto comma = list.find(',', start);
            const std::string item =
                list.substr(start, comma == std::string::npos ? std::string::npos
                                                              : comma - start);
            if (!item.empty()) names.push_back(item);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        const double tol = tol_s > 0.0 ? tol_s : config->cfg.cct_tol;
        return run_cct(config->cfg, names, tol, out_dir).summary;
    });
}

gfmts_status gfmts_run_doa(const gfmts_config* config, const char* strategy, int theta_points,
                           const char* out_dir, char* summary, size_t summarylen) {
    if (!config || !out_dir) return GFMTS_ERR_BAD_ARG;
    return guarded(summary, summarylen, [&] {
        const std::string name = strategy && *strategy ? strategy : config->cfg.strategy;
        const int points = theta_points > 0 ? theta_points : config->cfg.doa_theta_points;
        return run_doa(config->cfg, name, points, out_dir).summary;
    });
}

gfmts_status gfmts_run_sweep(const gfmts_config* config, const char* kind, const char* out_dir,
                             char* summary, size_t summarylen) {
    if (!config || !kind || !out_dir) return GFMTS_ERR_BAD_ARG;
    return guarded(summary, summarylen,
                   [&] { return run_sweep(config->cfg, kind, out_dir).summary; });
}

} // extern "C"
