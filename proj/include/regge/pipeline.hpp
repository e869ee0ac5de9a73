#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "amplitudes.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "pade.hpp"
#include "resonance.hpp"
#include "smatrix_io.hpp"
#include "trajectories.hpp"

namespace regge {

// An Error tagged with the pipeline stage that raised it.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const Error& e)
        : std::runtime_error("stage '" + stage + "': " + e.what()), stage_(std::move(stage)), code_(e.code())
    {
    }

    const std::string& stage() const noexcept { return stage_; }
    Errc code() const noexcept { return code_; }

private:
    std::string stage_;
    Errc code_;
};

template <class F>
auto run_stage(const std::string& name, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

inline TableOptions table_options(const RunConfig& cfg)
{
    TableOptions o;
    o.unitarity_tol = cfg.unitarity_tol;
    o.jmax_warn = cfg.jmax_warn;
    return o;
}

inline PartialWaveTable load_input(const RunConfig& cfg, std::vector<std::string>* warnings)
{
    return run_stage("load", [&] {
        if (cfg.input.empty()) fail(Errc::config, "no input table given (--input)");
        const TableOptions opt = table_options(cfg);
        if (cfg.format == "csv") return load_table(cfg.input, TableFormat::csv, opt, warnings);
        if (cfg.format == "json") return load_table(cfg.input, TableFormat::json, opt, warnings);
        return load_table(cfg.input, opt, warnings);
    });
}

inline QuadratureConfig quadrature_config(const RunConfig& cfg)
{
    QuadratureConfig q;
    q.abs_tol = cfg.abs_tol;
    q.rel_tol = cfg.rel_tol;
    q.max_depth = cfg.max_depth;
    q.panel_width = cfg.panel_width;
    q.lambda_cut = cfg.lambda_cut;
    return q;
}

inline PoleSearchOptions search_options(const RunConfig& cfg)
{
    PoleSearchOptions o;
    o.doublet_radius = cfg.doublet_radius;
    o.dedup_radius = cfg.dedup_radius;
    o.im_cap = cfg.im_cap;
    o.significance.im_max = cfg.im_max;
    o.significance.res_min = cfg.res_min;
    return o;
}

inline AngularGrid theta_grid(const RunConfig& cfg)
{
    return run_stage("config", [&] { return AngularGrid::degrees(cfg.theta_from_deg, cfg.theta_to_deg, cfg.theta_step_deg); });
}

struct PoleStage {
    std::vector<RationalApproximant> approximants;
    std::vector<PoleZeroSet> sets;  // per energy
};

inline PoleStage find_cam_poles(const PartialWaveTable& t, const RunConfig& cfg)
{
    return run_stage("poles", [&] {
        PoleStage s;
        s.approximants = build_cam_approximants(t, {}, cfg.threads);
        const SearchBox box = default_cam_box(t.jmax(), cfg.im_cap);
        const PoleSearchOptions opt = search_options(cfg);
        s.sets.resize(t.n_energies());
        parallel_for(t.n_energies(), cfg.threads, [&](std::size_t e) {
            try {
                s.sets[e] = find_poles_zeros(s.approximants[e], box, opt);
            } catch (const Error& err) {
                fail(err.code(), std::string(err.what()) + " at E=" + fmt(t.energies()[e]) + " meV");
            }
        });
        return s;
    });
}

inline std::vector<std::vector<PoleDatum>> significant_poles(const PoleStage& s)
{
    std::vector<std::vector<PoleDatum>> out;
    for (const auto& set : s.sets) {
        std::vector<PoleDatum> v;
        for (const auto& p : set.poles)
            if (p.significance == Significance::significant) v.push_back(p);
        out.push_back(std::move(v));
    }
    return out;
}

inline std::vector<ReggeTrajectory> build_trajectories(const PartialWaveTable& t, const PoleStage& s, const RunConfig& cfg,
                                                       std::vector<std::string>* notes)
{
    return run_stage("trajectories", [&] {
        std::vector<EnergyPoles> per;
        for (std::size_t e = 0; e < t.n_energies(); ++e) per.push_back({t.energies()[e], s.sets[e].poles});
        auto trajs = chain_trajectories(per, cfg.match_radius);
        const EnergyWindow w{cfg.fit_e_min, cfg.fit_e_max};
        for (auto& tr : trajs) {
            try {
                tr.fit = fit_linear(tr, w);
            } catch (const Error& err) {
                if (err.code() != Errc::too_few_points) throw;
                if (notes) notes->push_back(err.what());
            }
        }
        return trajs;
    });
}

// Significant poles per energy labelled by trajectory, longest-lived first.
inline std::vector<std::vector<LabeledPole>> labeled_poles(const PartialWaveTable& t, const PoleStage& s,
                                                           const std::vector<ReggeTrajectory>& trajs)
{
    std::vector<std::vector<LabeledPole>> out(t.n_energies());
    for (std::size_t e = 0; e < t.n_energies(); ++e) {
        for (const auto& p : s.sets[e].poles) {
            if (p.significance != Significance::significant) continue;
            std::string label;
            for (const auto& tr : trajs)
                for (const auto& pt : tr.points)
                    if (pt.energy == t.energies()[e] && pt.lambda == p.position) label = tr.label;
            out[e].push_back({label, p});
        }
        std::stable_sort(out[e].begin(), out[e].end(), [](const LabeledPole& a, const LabeledPole& b) {
            return a.pole.position.imag() < b.pole.position.imag();
        });
    }
    return out;
}

struct FoldStage {
    UnfoldedAmplitude unfolded;
    FoldedAmplitude folded;
    int m_max = 0;
    bool m_max_auto = false;
    std::vector<std::string> notes;
};

inline PhiGrid phi_grid_for(const RunConfig& cfg, int m_max)
{
    const double lo = std::min(cfg.phi_min_deg, -360.0 * m_max);
    const double hi = std::max(cfg.phi_max_deg, 180.0 * (2 * m_max + 1));
    return PhiGrid::degrees(lo, hi, cfg.phi_step_deg);
}

inline UnfoldedAmplitude unfold_stage(const PartialWaveTable& t, const PoleStage& s, const RunConfig& cfg, const PhiGrid& g)
{
    return run_stage("unfold", [&] { return unfold(t, s.approximants, g, quadrature_config(cfg), cfg.threads); });
}

// Unfolds on a grid wide enough for the fold and raises m_max until the pole-tail bound is met.
inline FoldStage fold_stage(const PartialWaveTable& t, const PoleStage& s, const RunConfig& cfg, const AngularGrid& grid)
{
    FoldStage fs;
    const auto poles = significant_poles(s);
    const double radius = t.jmax() > 0 ? pi / (2.0 * t.jmax()) : 0.0;
    int m = cfg.m_max;
    if (m == 0) {
        fs.m_max_auto = true;
        std::vector<double> scale(t.n_energies(), 0.0);
        double sin_min = 1.0;
        for (double th : grid.theta)
            if (th > radius && th < pi - radius) sin_min = std::min(sin_min, std::sin(th));
        for (std::size_t e = 0; e < t.n_energies(); ++e)
            for (double th : grid.theta) scale[e] = std::max(scale[e], std::abs(direct_amplitude(t, e, th)));
        m = required_m_max(poles, t.k(), scale, cfg.fold_tol, sin_min, 2, cfg.m_max_cap);
    }
    for (;;) {
        fs.unfolded = unfold_stage(t, s, cfg, phi_grid_for(cfg, m));
        FoldOptions fo;
        fo.m_max = m;
        fo.fold_tol = cfg.fold_tol;
        fo.jmax = t.jmax();
        fo.poles = poles;
        try {
            fs.folded = run_stage("fold", [&] { return fold(fs.unfolded, grid.theta, fo, cfg.threads); });
            fs.m_max = m;
            return fs;
        } catch (const StageError& e) {
            if (e.code() != Errc::truncation_too_coarse || !fs.m_max_auto || m >= cfg.m_max_cap) throw;
            fs.notes.push_back(std::string(e.what()) + "; retrying with m_max=" + std::to_string(m + 1));
            ++m;
        }
    }
}

struct CeStage {
    std::vector<CEPole> inverted;
    std::vector<CEPole> direct;
    std::vector<ResonanceObservables> inverted_obs;
    std::vector<ResonanceObservables> direct_obs;
    bool inverted_flipped = false;
    bool direct_flipped = false;
    std::vector<std::string> notes;
};

namespace detail {

inline const LinearFit* nearest_fit(const std::vector<ReggeTrajectory>& trajs, const CEPole& p)
{
    const LinearFit* best = nullptr;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& tr : trajs) {
        if (!tr.fit || std::abs(tr.fit->beta) < 1e-12) continue;
        if (!p.trajectory.empty()) {
            if (tr.label == p.trajectory) return &*tr.fit;
            continue;
        }
        const double dd = std::abs(tr.fit->at(p.energy.real()).real() - (p.J + 0.5));
        if (dd < d) {
            d = dd;
            best = &*tr.fit;
        }
    }
    return best;
}

inline ResonanceObservables safe_observables(const CEPole& p, const std::vector<ReggeTrajectory>& trajs, double moment,
                                             std::vector<std::string>& notes)
{
    ResonanceObservables o;
    o.rotational_constant = rotational_constant(p.energy.real(), p.J);
    try {
        o.lifetime_s = lifetime_s(p.energy);
    } catch (const Error& e) {
        notes.push_back("J=" + fmt(p.J) + " " + ce_source_name(p.source) + ": " + e.what());
    }
    if (const auto* f = nearest_fit(trajs, p)) {
        const cplx lambda = f->at(p.energy.real());
        try {
            o.angular_life_deg = angular_life_deg(lambda);
        } catch (const Error& e) {
            notes.push_back("J=" + fmt(p.J) + " " + ce_source_name(p.source) + ": " + e.what());
        }
        if (moment > 0) o.angular_velocity = lambda.real() / moment;
    }
    return o;
}

}  // namespace detail

inline CeStage ce_stage(const PartialWaveTable& t, const std::vector<ReggeTrajectory>& trajs, const RunConfig& cfg)
{
    return run_stage("ce-poles", [&] {
        CeStage c;
        std::vector<double> js;
        for (int j = cfg.ce_j_min; j <= cfg.ce_j_max; ++j) js.push_back(j);
        for (const auto& tr : trajs) {
            if (!tr.fit) continue;
            bool significant = false;
            for (const auto& p : tr.points) significant = significant || p.lambda.imag() <= cfg.im_max;
            if (!significant) continue;
            try {
                // the trajectory fits lambda = J + 1/2
                auto v = invert_to_ce(*tr.fit, js, 0.5, tr.label);
                c.inverted.insert(c.inverted.end(), v.begin(), v.end());
            } catch (const Error& e) {
                if (e.code() != Errc::beta_near_zero) throw;
                c.notes.push_back(tr.label + ": " + e.what());
            }
        }
        if (t.n_energies() >= 4) {
            const SearchBox box = default_ce_box(t);
            std::vector<std::vector<CEPole>> per(js.size());
            parallel_for(js.size(), cfg.threads, [&](std::size_t i) {
                const long J = static_cast<long>(js[i]);
                if (J <= t.jmax()) per[i] = ce_poles_direct(t, J, box);
            });
            for (auto& v : per) c.direct.insert(c.direct.end(), v.begin(), v.end());
        } else {
            c.notes.push_back("fewer than 4 energies, direct CE search skipped");
        }
        c.inverted_flipped = normalize_ce_signs(c.inverted);
        c.direct_flipped = normalize_ce_signs(c.direct);
        for (const auto& p : c.inverted) c.inverted_obs.push_back(detail::safe_observables(p, trajs, cfg.moment, c.notes));
        for (const auto& p : c.direct) c.direct_obs.push_back(detail::safe_observables(p, trajs, cfg.moment, c.notes));
        return c;
    });
}

// ---- CSV writers ----

inline void write_dcs_csv(std::ostream& out, const DcsSurface& d)
{
    out << "E_meV,theta_deg,sigma\n";
    for (std::size_t e = 0; e < d.energies.size(); ++e)
        for (std::size_t i = 0; i < d.theta.size(); ++i)
            out << fmt(d.energies[e]) << ',' << fmt(rad2deg(d.theta[i])) << ',' << fmt(d.sigma[e][i]) << '\n';
}

inline void write_folded_dcs_csv(std::ostream& out, const FoldedAmplitude& f)
{
    out << "E_meV,theta_deg,sigma\n";
    for (std::size_t e = 0; e < f.energies.size(); ++e)
        for (std::size_t i = 0; i < f.theta.size(); ++i)
            out << fmt(f.energies[e]) << ',' << fmt(rad2deg(f.theta[i])) << ',' << fmt(std::norm(f.points[e][i].total))
                << '\n';
}

inline void write_unfold_csv(std::ostream& out, const UnfoldedAmplitude& u)
{
    out << "E_meV,phi_deg,re_f,im_f,re_g,im_g,err_est\n";
    for (std::size_t e = 0; e < u.energies.size(); ++e)
        for (std::size_t i = 0; i < u.phi.size(); ++i)
            out << fmt(u.energies[e]) << ',' << fmt(rad2deg(u.phi[i])) << ',' << fmt(u.f[e][i].real()) << ','
                << fmt(u.f[e][i].imag()) << ',' << fmt(u.g[e][i].real()) << ',' << fmt(u.g[e][i].imag()) << ','
                << fmt(u.err[e][i]) << '\n';
}

inline void write_poles_csv(std::ostream& out, const PartialWaveTable& t, const PoleStage& s)
{
    out << "E_meV,axis,re_pos,im_pos,re_res,im_res,significance\n";
    for (std::size_t e = 0; e < t.n_energies(); ++e)
        for (const auto& p : s.sets[e].poles)
            out << fmt(t.energies()[e]) << ',' << axis_name(p.axis) << ',' << fmt(p.position.real()) << ','
                << fmt(p.position.imag()) << ',' << fmt(p.residue.real()) << ',' << fmt(p.residue.imag()) << ','
                << significance_name(p.significance) << '\n';
}

inline void write_trajectories_csv(std::ostream& out, const std::vector<ReggeTrajectory>& trajs)
{
    out << "label,E_meV,re_lambda,im_lambda,re_res,im_res\n";
    for (const auto& tr : trajs)
        for (const auto& p : tr.points)
            out << tr.label << ',' << fmt(p.energy) << ',' << fmt(p.lambda.real()) << ',' << fmt(p.lambda.imag()) << ','
                << fmt(p.residue.real()) << ',' << fmt(p.residue.imag()) << '\n';
}

inline void write_ce_csv(std::ostream& out, const CeStage& c)
{
    out << "J,J_J_plus_1,source,trajectory,re_E_meV,im_E_meV,lifetime_s,angular_life_deg,B_meV,omega_rad_s\n";
    auto rows = [&](const std::vector<CEPole>& v, const std::vector<ResonanceObservables>& o) {
        for (std::size_t i = 0; i < v.size(); ++i)
            out << fmt(v[i].J) << ',' << fmt(v[i].J * (v[i].J + 1)) << ',' << ce_source_name(v[i].source) << ','
                << v[i].trajectory << ',' << fmt(v[i].energy.real()) << ',' << fmt(v[i].energy.imag()) << ','
                << fmt(o[i].lifetime_s) << ',' << fmt(o[i].angular_life_deg) << ',' << fmt(o[i].rotational_constant) << ','
                << (o[i].angular_velocity ? fmt(*o[i].angular_velocity) : std::string()) << '\n';
    };
    rows(c.inverted, c.inverted_obs);
    rows(c.direct, c.direct_obs);
}

inline void write_decompose_csv(std::ostream& out, const std::vector<DecompositionReport>& reps, bool header = true)
{
    if (header) out << "E_meV,theta_tag,term_label,re,im,abs2,exact_abs2,residual\n";
    for (const auto& rep : reps)
        for (const auto& row : rep.rows)
            for (const auto& t : row.terms)
                out << fmt(row.energy) << ',' << rep.tag << ',' << t.label << ',' << fmt(t.value.real()) << ','
                    << fmt(t.value.imag()) << ',' << fmt(t.abs2) << ',' << fmt(row.exact_abs2) << ',' << fmt(t.residual)
                    << '\n';
}

// Reads the CE CSV written above. Columns are found by header name; without a header the
// layout is J, source, re_E_meV, im_E_meV.
inline std::vector<CEPole> read_ce_csv(std::istream& in, const std::string& origin = "CE table")
{
    std::vector<CEPole> out;
    std::string line;
    int n = 0;
    bool first = true;
    std::size_t cj = 0, csrc = 1, cre = 2, cim = 3, ctraj = std::string::npos;
    while (std::getline(in, line)) {
        ++n;
        auto s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        std::vector<std::string> cols;
        std::stringstream ss{std::string(s)};
        for (std::string c; std::getline(ss, c, ',');) cols.emplace_back(trim(c));
        if (first) {
            first = false;
            if (!cols.empty() && cols[0] == "J") {
                auto find = [&](const char* name) {
                    auto it = std::find(cols.begin(), cols.end(), name);
                    return it == cols.end() ? std::string::npos : static_cast<std::size_t>(it - cols.begin());
                };
                csrc = find("source");
                cre = find("re_E_meV");
                cim = find("im_E_meV");
                ctraj = find("trajectory");
                if (cre == std::string::npos || cim == std::string::npos)
                    fail(Errc::malformed_header, origin + ":" + std::to_string(n) + ": needs re_E_meV and im_E_meV columns");
                continue;
            }
        }
        const std::size_t need = std::max({cj, cre, cim}) + 1;
        if (cols.size() < need)
            fail(Errc::malformed_row, origin + ":" + std::to_string(n) + ": expected at least " + std::to_string(need) +
                                          " fields");
        auto j = parse_double(cols[cj]);
        auto re = parse_double(cols[cre]);
        auto im = parse_double(cols[cim]);
        if (!j || !re || !im) fail(Errc::malformed_row, origin + ":" + std::to_string(n) + ": non-numeric field");
        CEPole p;
        p.J = *j;
        p.energy = {*re, *im};
        if (csrc < cols.size() && cols[csrc] == "direct_pade_in_E") p.source = CeSource::direct_pade_in_e;
        if (ctraj < cols.size()) p.trajectory = cols[ctraj];
        out.push_back(p);
    }
    return out;
}

inline std::vector<CEPole> load_ce_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open " + path.string());
    return read_ce_csv(in, path.string());
}

// ---- summary ----

namespace detail {

inline nlohmann::ordered_json cjson(cplx z) { return nlohmann::ordered_json::array({z.real(), z.imag()}); }

inline nlohmann::ordered_json finite_or_null(double x)
{
    return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json ce_json(const std::vector<CEPole>& v, const std::vector<ResonanceObservables>& o)
{
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < v.size(); ++i) {
        nlohmann::ordered_json j;
        j["J"] = v[i].J;
        j["J_J_plus_1"] = v[i].J * (v[i].J + 1);
        if (!v[i].trajectory.empty()) j["trajectory"] = v[i].trajectory;
        j["E_meV"] = cjson(v[i].energy);
        j["lifetime_s"] = finite_or_null(o[i].lifetime_s);
        j["angular_life_deg"] = finite_or_null(o[i].angular_life_deg);
        j["B_meV"] = finite_or_null(o[i].rotational_constant);
        if (o[i].angular_velocity) j["angular_velocity_rad_s"] = finite_or_null(*o[i].angular_velocity);
        arr.push_back(j);
    }
    return arr;
}

inline nlohmann::ordered_json decomposition_json(const DecompositionReport& r)
{
    nlohmann::ordered_json j;
    j["tag"] = r.tag;
    j["max_exact_abs2"] = r.max_exact_abs2();
    nlohmann::ordered_json terms = nlohmann::ordered_json::object();
    if (!r.rows.empty())
        for (const auto& t : r.rows.front().terms)
            if (t.label.rfind("approx:", 0) == 0) terms[t.label] = r.max_abs_residual(t.label);
    j["max_abs_residual"] = terms;
    return j;
}

}  // namespace detail

struct PipelineResult {
    PartialWaveTable table;
    std::vector<std::string> warnings;
    DcsSurface direct;
    PoleStage poles;
    std::vector<ReggeTrajectory> trajectories;
    std::vector<std::vector<LabeledPole>> labeled;
    FoldStage fold;
    TailResidual tails;
    std::vector<DecompositionReport> decompositions;
    CeStage ce;
    std::optional<CeComparison> comparison;
    double max_fold_vs_direct = 0;  // relative, over the theta grid
};

inline std::vector<DecompositionReport> decomposition_stage(const PartialWaveTable& t, const FoldStage& fs,
                                                            const std::vector<std::vector<LabeledPole>>& labeled,
                                                            const RunConfig& cfg)
{
    return run_stage("decompose", [&] {
        std::vector<DecompositionReport> reps;
        reps.push_back(decompose_forward(fs.unfolded, labeled, fs.m_max));
        const double th = deg2rad(cfg.sideway_theta_deg);
        const double radius = t.jmax() > 0 ? pi / (2.0 * t.jmax()) : 0.0;
        if (th > radius && th < pi - radius) {
            FoldOptions fo;
            fo.m_max = fs.m_max;
            fo.jmax = t.jmax();
            auto one = fold(fs.unfolded, {th}, fo, cfg.threads);
            reps.push_back(decompose_sideway(one, labeled, th));
        }
        reps.push_back(decompose_backward(fs.unfolded, labeled, fs.m_max));
        return reps;
    });
}

inline PipelineResult run_pipeline(const PartialWaveTable& table, const RunConfig& cfg, std::vector<std::string> warnings = {})
{
    PipelineResult r{table, std::move(warnings), {}, {}, {}, {}, {}, {}, {}, {}, {}, 0.0};
    const AngularGrid grid = theta_grid(cfg);
    r.direct = run_stage("dcs", [&] { return dcs_direct(table, grid); });
    r.poles = find_cam_poles(table, cfg);
    for (const auto& s : r.poles.sets) r.warnings.insert(r.warnings.end(), s.notes.begin(), s.notes.end());
    r.trajectories = build_trajectories(table, r.poles, cfg, &r.warnings);
    r.labeled = labeled_poles(table, r.poles, r.trajectories);
    r.fold = fold_stage(table, r.poles, cfg, grid);
    r.warnings.insert(r.warnings.end(), r.fold.notes.begin(), r.fold.notes.end());
    for (std::size_t e = 0; e < table.n_energies(); ++e) {
        double peak = 0;
        for (double s : r.direct.sigma[e]) peak = std::max(peak, s);
        for (std::size_t i = 0; i < grid.theta.size(); ++i) {
            const double a = std::norm(r.fold.folded.points[e][i].total), b = r.direct.sigma[e][i];
            if (peak > 0) r.max_fold_vs_direct = std::max(r.max_fold_vs_direct, std::abs(a - b) / std::max(b, 1e-300));
        }
    }
    r.tails = run_stage("tails", [&] { return subtract_tails(r.fold.unfolded, significant_poles(r.poles)); });
    r.decompositions = decomposition_stage(table, r.fold, r.labeled, cfg);
    r.ce = ce_stage(table, r.trajectories, cfg);
    r.warnings.insert(r.warnings.end(), r.ce.notes.begin(), r.ce.notes.end());
    if (!cfg.ce_reference.empty()) {
        r.comparison = run_stage("compare", [&] {
            auto ref = load_ce_csv(cfg.ce_reference);
            normalize_ce_signs(ref);
            return compare_ce_sets(r.ce.inverted, ref, cfg.offset_mev);
        });
        r.warnings.insert(r.warnings.end(), r.comparison->warnings.begin(), r.comparison->warnings.end());
    }
    return r;
}

inline nlohmann::ordered_json summary_json(const PipelineResult& r, const RunConfig& cfg)
{
    using nlohmann::ordered_json;
    using detail::cjson;
    ordered_json j;
    j["config"] = cfg.to_json();
    ordered_json in;
    in["transition"] = r.table.transition().str();
    in["jmax"] = r.table.jmax();
    in["energies_meV"] = r.table.energies();
    j["input"] = in;

    ordered_json poles = ordered_json::array();
    for (std::size_t e = 0; e < r.table.n_energies(); ++e) {
        ordered_json pe;
        pe["E_meV"] = r.table.energies()[e];
        ordered_json list = ordered_json::array();
        for (const auto& p : r.poles.sets[e].poles) {
            ordered_json pj;
            pj["position"] = cjson(p.position);
            pj["residue"] = cjson(p.residue);
            pj["significance"] = significance_name(p.significance);
            pj["ill_conditioned"] = p.ill_conditioned;
            for (const auto& lp : r.labeled[e])
                if (lp.pole.position == p.position) pj["trajectory"] = lp.label;
            list.push_back(pj);
        }
        pe["poles"] = list;
        poles.push_back(pe);
    }
    j["poles"] = poles;

    ordered_json trajs = ordered_json::array();
    for (const auto& tr : r.trajectories) {
        ordered_json tj;
        tj["label"] = tr.label;
        tj["points"] = tr.points.size();
        tj["short"] = tr.is_short;
        tj["E_range_meV"] = {tr.points.front().energy, tr.points.back().energy};
        if (tr.fit) {
            ordered_json f;
            f["alpha"] = cjson(tr.fit->alpha);
            f["beta_per_meV"] = cjson(tr.fit->beta);
            f["rms"] = tr.fit->rms;
            f["n"] = tr.fit->n;
            tj["fit"] = f;
            ordered_json obs = ordered_json::array();
            for (const auto& p : tr.points)
                if (p.lambda.imag() > 0) obs.push_back({{"E_meV", p.energy}, {"angular_life_deg", angular_life_deg(p.lambda)}});
            tj["angular_life"] = obs;
        }
        trajs.push_back(tj);
    }
    j["trajectories"] = trajs;

    ordered_json fold;
    fold["m_max"] = r.fold.m_max;
    fold["m_max_source"] = r.fold.m_max_auto ? "auto" : "config";
    fold["phi_range_deg"] = {rad2deg(r.fold.unfolded.phi_min()), rad2deg(r.fold.unfolded.phi_max())};
    fold["max_rel_diff_vs_direct"] = r.max_fold_vs_direct;
    j["fold"] = fold;

    ordered_json tails = ordered_json::array();
    for (std::size_t e = 0; e < r.tails.energies.size(); ++e) {
        const double ref = std::abs(r.fold.unfolded.f_at(e, pi));
        tails.push_back({{"E_meV", r.tails.energies[e]},
                         {"max_abs_delta_f", r.tails.max_f[e]},
                         {"rms_delta_f", r.tails.rms_f[e]},
                         {"abs_f_at_pi", ref}});
    }
    j["tail_residual"] = tails;

    ordered_json dec = ordered_json::array();
    for (const auto& d : r.decompositions) dec.push_back(detail::decomposition_json(d));
    j["decomposition"] = dec;

    ordered_json ce;
    ce["im_sign_flipped"] = {{"inverted", r.ce.inverted_flipped}, {"direct", r.ce.direct_flipped}};
    ce["inverted_from_CAM"] = detail::ce_json(r.ce.inverted, r.ce.inverted_obs);
    ce["direct_pade_in_E"] = detail::ce_json(r.ce.direct, r.ce.direct_obs);
    j["ce_poles"] = ce;

    if (r.comparison) {
        ordered_json c;
        c["offset_meV"] = r.comparison->offset;
        c["best_offset_meV"] = detail::finite_or_null(r.comparison->best_offset);
        c["rms_dRe_meV"] = detail::finite_or_null(r.comparison->rms_re);
        ordered_json pairs = ordered_json::array();
        for (const auto& p : r.comparison->pairs) pairs.push_back({{"J", p.J}, {"dRe_meV", p.d_re}, {"dIm_meV", p.d_im}});
        c["pairs"] = pairs;
        j["comparison"] = c;
    }
    j["warnings"] = r.warnings;
    return j;
}

}  // namespace regge
