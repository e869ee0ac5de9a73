#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "format.hpp"

namespace regge {

// Run configuration. File format: one `key = value` per line, `#` starts a comment.
// Every key has a default, so an empty file is a valid configuration.
struct RunConfig {
    std::string input;
    std::string out = ".";
    std::string format = "auto";  // input table format: auto, csv, json

    // smatrix_io
    int jmax_warn = 20;
    double unitarity_tol = 1e-6;

    // quadrature for f~, g~
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 14;
    double panel_width = 0.5;
    double lambda_cut = 0;  // 0: J_max + 1/2

    // phi grid in degrees; the pipeline widens it to cover the fold when needed
    double phi_min_deg = -180;
    double phi_max_deg = 540;
    double phi_step_deg = 0.5;

    // theta grid in degrees
    double theta_from_deg = 0;
    double theta_to_deg = 180;
    double theta_step_deg = 1;

    int m_max = 0;  // 0: chosen from the pole tails
    int m_max_cap = 12;
    double fold_tol = 1e-3;
    double sideway_theta_deg = 90;

    // pole search
    double im_cap = 4;
    double im_max = 3;
    double res_min = 1e-4;
    double doublet_radius = 1e-3;
    double dedup_radius = 1e-8;

    // trajectories and CE poles
    double match_radius = 1.0;
    double fit_e_min = -1e300;
    double fit_e_max = 1e300;
    int ce_j_min = 12;
    int ce_j_max = 17;
    double moment = 0;  // I / hbar in s, 0: omit angular velocity
    std::string ce_reference;  // CE-pole CSV compared against the inverted set
    double offset_mev = 0;

    // synth
    std::string preset = "one-pole-40";
    std::string model;  // JSON model description (or a ledger); overrides preset
    double noise = 0;
    unsigned long seed = 1;

    int threads = 1;

    void set(const std::string& key, const std::string& value);
    nlohmann::ordered_json to_json() const;
    void validate() const;
};

namespace detail {

inline double cfg_double(const std::string& key, const std::string& v)
{
    auto d = parse_double(v);
    if (!d) fail(Errc::config, "key '" + key + "': '" + v + "' is not a number");
    return *d;
}

inline long cfg_long(const std::string& key, const std::string& v)
{
    auto d = parse_long(v);
    if (!d) fail(Errc::config, "key '" + key + "': '" + v + "' is not an integer");
    return *d;
}

}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& value)
{
    using detail::cfg_double;
    using detail::cfg_long;
    const std::map<std::string, double*> doubles{
        {"unitarity_tol", &unitarity_tol}, {"abs_tol", &abs_tol},
        {"rel_tol", &rel_tol},             {"panel_width", &panel_width},
        {"lambda_cut", &lambda_cut},       {"phi_min_deg", &phi_min_deg},
        {"phi_max_deg", &phi_max_deg},     {"phi_step_deg", &phi_step_deg},
        {"theta_from_deg", &theta_from_deg}, {"theta_to_deg", &theta_to_deg},
        {"theta_step_deg", &theta_step_deg}, {"fold_tol", &fold_tol},
        {"sideway_theta_deg", &sideway_theta_deg}, {"im_cap", &im_cap},
        {"im_max", &im_max},               {"res_min", &res_min},
        {"doublet_radius", &doublet_radius}, {"dedup_radius", &dedup_radius},
        {"match_radius", &match_radius},   {"fit_e_min", &fit_e_min},
        {"fit_e_max", &fit_e_max},         {"moment", &moment},
        {"offset_mev", &offset_mev},       {"noise", &noise},
    };
    const std::map<std::string, int*> ints{
        {"jmax_warn", &jmax_warn}, {"max_depth", &max_depth}, {"m_max", &m_max},   {"m_max_cap", &m_max_cap},
        {"ce_j_min", &ce_j_min},   {"ce_j_max", &ce_j_max},   {"threads", &threads},
    };
    const std::map<std::string, std::string*> strings{
        {"input", &input}, {"out", &out}, {"format", &format}, {"ce_reference", &ce_reference}, {"preset", &preset},
        {"model", &model},
    };
    if (auto it = doubles.find(key); it != doubles.end()) {
        *it->second = cfg_double(key, value);
    } else if (auto it2 = ints.find(key); it2 != ints.end()) {
        *it2->second = static_cast<int>(cfg_long(key, value));
    } else if (auto it3 = strings.find(key); it3 != strings.end()) {
        *it3->second = value;
    } else if (key == "seed") {
        seed = static_cast<unsigned long>(cfg_long(key, value));
    } else if (key == "theta_grid") {
        // a:b:step in degrees
        std::vector<std::string> parts;
        std::stringstream ss(value);
        for (std::string p; std::getline(ss, p, ':');) parts.emplace_back(trim(p));
        if (parts.size() != 3) fail(Errc::config, "theta_grid must be from:to:step, got '" + value + "'");
        theta_from_deg = cfg_double(key, parts[0]);
        theta_to_deg = cfg_double(key, parts[1]);
        theta_step_deg = cfg_double(key, parts[2]);
    } else {
        fail(Errc::config, "unknown key '" + key + "'");
    }
}

inline void RunConfig::validate() const
{
    auto positive = [](const char* name, double v) {
        if (!(v > 0)) fail(Errc::config, std::string(name) + " must be positive");
    };
    positive("unitarity_tol", unitarity_tol);
    positive("abs_tol", abs_tol);
    positive("rel_tol", rel_tol);
    positive("panel_width", panel_width);
    positive("phi_step_deg", phi_step_deg);
    positive("theta_step_deg", theta_step_deg);
    positive("fold_tol", fold_tol);
    positive("im_cap", im_cap);
    positive("im_max", im_max);
    positive("res_min", res_min);
    positive("doublet_radius", doublet_radius);
    positive("dedup_radius", dedup_radius);
    positive("match_radius", match_radius);
    if (max_depth < 1) fail(Errc::config, "max_depth must be at least 1");
    if (m_max < 0 || m_max_cap < 1) fail(Errc::config, "m_max must be >= 0 and m_max_cap >= 1");
    if (threads < 1) fail(Errc::config, "threads must be at least 1");
    if (lambda_cut < 0) fail(Errc::config, "lambda_cut must be >= 0");
    if (!(phi_max_deg > phi_min_deg)) fail(Errc::config, "phi_max_deg must exceed phi_min_deg");
    if (ce_j_min < 0 || ce_j_max < ce_j_min) fail(Errc::config, "need 0 <= ce_j_min <= ce_j_max");
    if (noise < 0) fail(Errc::config, "noise must be >= 0");
    if (format != "auto" && format != "csv" && format != "json") fail(Errc::config, "format must be auto, csv or json");
}

inline nlohmann::ordered_json RunConfig::to_json() const
{
    nlohmann::ordered_json j;
    j["input"] = input;
    j["out"] = out;
    j["format"] = format;
    j["jmax_warn"] = jmax_warn;
    j["unitarity_tol"] = unitarity_tol;
    j["abs_tol"] = abs_tol;
    j["rel_tol"] = rel_tol;
    j["max_depth"] = max_depth;
    j["panel_width"] = panel_width;
    j["lambda_cut"] = lambda_cut;
    j["phi_min_deg"] = phi_min_deg;
    j["phi_max_deg"] = phi_max_deg;
    j["phi_step_deg"] = phi_step_deg;
    j["theta_from_deg"] = theta_from_deg;
    j["theta_to_deg"] = theta_to_deg;
    j["theta_step_deg"] = theta_step_deg;
    j["m_max"] = m_max;
    j["m_max_cap"] = m_max_cap;
    j["fold_tol"] = fold_tol;
    j["sideway_theta_deg"] = sideway_theta_deg;
    j["im_cap"] = im_cap;
    j["im_max"] = im_max;
    j["res_min"] = res_min;
    j["doublet_radius"] = doublet_radius;
    j["dedup_radius"] = dedup_radius;
    j["match_radius"] = match_radius;
    j["fit_e_min"] = fit_e_min;
    j["fit_e_max"] = fit_e_max;
    j["ce_j_min"] = ce_j_min;
    j["ce_j_max"] = ce_j_max;
    j["moment"] = moment;
    j["ce_reference"] = ce_reference;
    j["offset_mev"] = offset_mev;
    j["preset"] = preset;
    j["model"] = model;
    j["noise"] = noise;
    j["seed"] = seed;
    return j;
}

inline void apply_config_text(RunConfig& cfg, std::istream& in, const std::string& origin = "config")
{
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = std::string(trim(line));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(Errc::config, origin + ":" + std::to_string(n) + ": expected key = value");
        try {
            cfg.set(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
        } catch (const Error& e) {
            std::string what = e.what();
            const std::string prefix = std::string(errc_name(e.code())) + ": ";
            if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
            fail(e.code(), origin + ":" + std::to_string(n) + ": " + what);
        }
    }
}

inline RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open config " + path.string());
    RunConfig cfg;
    apply_config_text(cfg, in, path.string());
    return cfg;
}

}  // namespace regge
