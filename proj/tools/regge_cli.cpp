// regge: command-line front end for the Regge-pole analysis library.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regge/regge.hpp"

namespace fs = std::filesystem;
using namespace regge;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> input, out, theta_grid, ce_reference, preset, model;
    std::optional<int> jmax_warn, m_max, threads;
    std::optional<double> phi_max_deg, im_cap, res_min, offset_mev, noise;
    std::optional<unsigned long> seed;
};

RunConfig make_config(const Overrides& o)
{
    RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (o.input) cfg.input = *o.input;
    if (o.out) cfg.out = *o.out;
    if (o.theta_grid) cfg.set("theta_grid", *o.theta_grid);
    if (o.ce_reference) cfg.ce_reference = *o.ce_reference;
    if (o.preset) cfg.preset = *o.preset;
    if (o.model) cfg.model = *o.model;
    if (o.jmax_warn) cfg.jmax_warn = *o.jmax_warn;
    if (o.m_max) cfg.m_max = *o.m_max;
    if (o.threads) cfg.threads = *o.threads;
    if (o.phi_max_deg) cfg.phi_max_deg = *o.phi_max_deg;
    if (o.im_cap) cfg.im_cap = *o.im_cap;
    if (o.res_min) cfg.res_min = *o.res_min;
    if (o.offset_mev) cfg.offset_mev = *o.offset_mev;
    if (o.noise) cfg.noise = *o.noise;
    if (o.seed) cfg.seed = *o.seed;
    cfg.validate();
    return cfg;
}

// Writes to `path`, or stdout when no path was given.
template <class F>
void emit(const std::optional<std::string>& path, F&& write)
{
    if (!path || *path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(*path);
    if (!out) fail(Errc::io, "cannot write " + *path);
    write(out);
}

void report(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int run(const std::string& cmd, const Overrides& ov)
{
    const RunConfig cfg = run_stage("config", [&] { return make_config(ov); });
    std::vector<std::string> warnings;

    if (cmd == "synth") {
        if (!ov.out) fail(Errc::config, "synth needs --out <table.csv|table.json>");
        run_stage("synth", [&] {
            synth::SyntheticModel model;
            if (cfg.model.empty()) {
                model = synth::preset(cfg.preset);
            } else {
                std::ifstream in(cfg.model);
                if (!in) fail(Errc::io, "cannot open model " + cfg.model);
                nlohmann::json j;
                try {
                    in >> j;
                } catch (const nlohmann::json::exception& ex) {
                    fail(Errc::config, cfg.model + ": " + ex.what());
                }
                model = synth::model_from_json(j.contains("model") ? j["model"] : j);
            }
            auto g = synth::generate(model);
            PartialWaveTable t = cfg.noise > 0 ? synth::add_noise(g.table, cfg.noise, cfg.seed) : g.table;
            const fs::path path = *ov.out;
            save_table(path, t, format_from_path(path));
            fs::path ledger = path;
            ledger.replace_extension(".ledger.json");
            std::ofstream lo(ledger);
            if (!lo) fail(Errc::io, "cannot write " + ledger.string());
            auto j = synth::ledger_to_json(model, g.ledger);
            j["preset"] = cfg.model.empty() ? cfg.preset : std::string();
            j["noise"] = cfg.noise;
            j["seed"] = cfg.seed;
            lo << j.dump(1) << '\n';
            return 0;
        });
        return 0;
    }

    const PartialWaveTable t = load_input(cfg, &warnings);
    report(warnings);
    warnings.clear();

    if (cmd == "dcs") {
        auto d = run_stage("dcs", [&] { return dcs_direct(t, theta_grid(cfg)); });
        emit(ov.out, [&](std::ostream& o) { write_dcs_csv(o, d); });
        return 0;
    }
    if (cmd == "unfold") {
        auto approx = run_stage("pade", [&] { return build_cam_approximants(t, {}, cfg.threads); });
        PoleStage s{std::move(approx), {}};
        auto g = run_stage("config", [&] { return PhiGrid::degrees(cfg.phi_min_deg, cfg.phi_max_deg, cfg.phi_step_deg); });
        auto u = unfold_stage(t, s, cfg, g);
        emit(ov.out, [&](std::ostream& o) { write_unfold_csv(o, u); });
        return 0;
    }

    auto poles = find_cam_poles(t, cfg);
    for (const auto& s : poles.sets) report(s.notes);
    if (cmd == "poles") {
        emit(ov.out, [&](std::ostream& o) { write_poles_csv(o, t, poles); });
        return 0;
    }
    auto trajs = build_trajectories(t, poles, cfg, &warnings);
    report(warnings);
    warnings.clear();
    if (cmd == "trajectories") {
        emit(ov.out, [&](std::ostream& o) { write_trajectories_csv(o, trajs); });
        return 0;
    }
    if (cmd == "ce-poles") {
        auto ce = ce_stage(t, trajs, cfg);
        report(ce.notes);
        emit(ov.out, [&](std::ostream& o) { write_ce_csv(o, ce); });
        return 0;
    }
    if (cmd == "decompose") {
        auto labeled = labeled_poles(t, poles, trajs);
        auto fstage = fold_stage(t, poles, cfg, theta_grid(cfg));
        report(fstage.notes);
        auto reps = decomposition_stage(t, fstage, labeled, cfg);
        emit(ov.out, [&](std::ostream& o) { write_decompose_csv(o, reps); });
        return 0;
    }
    if (cmd == "pipeline") {
        const fs::path dir = cfg.out;
        run_stage("output", [&] {
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec) fail(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
            return 0;
        });
        auto r = run_pipeline(t, cfg);
        report(r.warnings);
        run_stage("output", [&] {
            auto file = [&](const char* name, auto&& w) { emit((dir / name).string(), w); };
            file("dcs.csv", [&](std::ostream& o) { write_dcs_csv(o, r.direct); });
            file("dcs_folded.csv", [&](std::ostream& o) { write_folded_dcs_csv(o, r.fold.folded); });
            file("unfold.csv", [&](std::ostream& o) { write_unfold_csv(o, r.fold.unfolded); });
            file("poles.csv", [&](std::ostream& o) { write_poles_csv(o, t, r.poles); });
            file("trajectories.csv", [&](std::ostream& o) { write_trajectories_csv(o, r.trajectories); });
            file("ce_poles.csv", [&](std::ostream& o) { write_ce_csv(o, r.ce); });
            file("decompose.csv", [&](std::ostream& o) { write_decompose_csv(o, r.decompositions); });
            file("summary.json", [&](std::ostream& o) { o << summary_json(r, cfg).dump(1) << '\n'; });
            return 0;
        });
        return 0;
    }
    fail(Errc::config, "unknown subcommand " + cmd);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Regge-pole analysis of partial-wave S-matrix tables"};
    app.fallthrough();
    app.require_subcommand(1, 1);

    Overrides ov;
    app.add_option("--config", ov.config, "key = value run configuration file");
    app.add_option("--input", ov.input, "S-matrix table (.csv or .json)");
    app.add_option("--out", ov.out, "output file (output directory for pipeline); stdout if omitted");
    app.add_option("--jmax-warn", ov.jmax_warn, "warn when J_max is below this");
    app.add_option("--theta-grid", ov.theta_grid, "scattering angles from:to:step in degrees");
    app.add_option("--phi-max-deg", ov.phi_max_deg, "upper end of the winding-angle grid");
    app.add_option("--m-max", ov.m_max, "fold truncation |m| <= m_max (0 picks it from the pole tails)");
    app.add_option("--im-cap", ov.im_cap, "largest Im lambda searched for poles");
    app.add_option("--res-min", ov.res_min, "smallest |residue| counted as significant");
    app.add_option("--offset-mev", ov.offset_mev, "energy offset applied to the reference CE poles");
    app.add_option("--ce-reference", ov.ce_reference, "CE-pole CSV to compare against");
    app.add_option("--threads", ov.threads, "worker threads");
    app.add_option("--preset", ov.preset, "synthetic model for synth");
    app.add_option("--model", ov.model, "JSON model description for synth (overrides --preset)");
    app.add_option("--noise", ov.noise, "multiplicative noise level for synth");
    app.add_option("--seed", ov.seed, "noise seed for synth");

    const std::vector<std::pair<std::string, std::string>> cmds{
        {"dcs", "partial-wave DCS on a theta grid"},
        {"unfold", "unfolded amplitudes f~, g~ on a phi grid"},
        {"poles", "Regge poles and residues at each energy"},
        {"trajectories", "chain poles into Regge trajectories"},
        {"ce-poles", "complex-energy poles and observables"},
        {"decompose", "forward, sideway and backward decompositions"},
        {"synth", "write a synthetic table and its ledger"},
        {"pipeline", "run every stage and write a summary"},
    };
    for (const auto& [name, help] : cmds) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "regge: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        return run(cmd, ov);
    } catch (const StageError& e) {
        std::cerr << "regge " << cmd << ": " << e.what() << '\n';
        return is_validation_error(e.code()) ? 2 : 3;
    } catch (const Error& e) {
        std::cerr << "regge " << cmd << ": " << e.what() << '\n';
        return is_validation_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "regge " << cmd << ": " << e.what() << '\n';
        return 3;
    }
}
