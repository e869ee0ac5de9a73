#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "format.hpp"
#include "smatrix_io.hpp"

namespace regge::synth {

struct BackgroundProfile {
    enum class Shape { gaussian, lorentzian_product };
    Shape shape = Shape::gaussian;
    double amplitude = 1.0;
    double center = 0.0;
    double width = 10.0;          // gaussian
    std::vector<double> widths;   // lorentzian product
    std::vector<double> phase;    // delta(lambda) = sum phase[k] lambda^k
    double onset = 0.0;           // > 0: extra factor (lambda^2 / (lambda^2 + onset^2))^onset_power
    int onset_power = 1;
};

// lambda0(E) = alpha + beta E + gamma (E - e_ref)^2.  strength 1 gives the unitary factor
// (lambda - conj lambda0) / (lambda - lambda0).
struct PoleTrajectory {
    cplx alpha;
    cplx beta;
    cplx gamma = 0.0;
    double e_ref = 0.0;
    double strength = 1.0;
    std::string label;

    cplx at(cplx e) const { return alpha + beta * e + gamma * (e - e_ref) * (e - e_ref); }
    cplx conj_at(cplx e) const
    {
        return std::conj(alpha) + std::conj(beta) * e + std::conj(gamma) * (e - e_ref) * (e - e_ref);
    }
    // The pole factor's zero, analytic in E.
    cplx zero_at(cplx e) const { return (1.0 - strength) * at(e) + strength * conj_at(e); }
};

struct ZeroTrajectory {
    cplx alpha;
    cplx beta;

    cplx at(cplx e) const { return alpha + beta * e; }
    cplx conj_at(cplx e) const { return std::conj(alpha) + std::conj(beta) * e; }
};

struct SyntheticModel {
    TransitionLabel transition{0, 0, 0, 3, 0, 0};
    BackgroundProfile background;
    std::vector<PoleTrajectory> poles;
    std::vector<ZeroTrajectory> zeros;
    std::vector<double> energies;
    int jmax = 40;
    double k_scale = 0.1;  // k(E) = k_scale * sqrt(E)

    double k_at(double e) const { return k_scale * std::sqrt(e); }
};

inline std::vector<double> default_energy_grid(std::size_t n = 17)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 62.09 + (101.67 - 62.09) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

inline cplx background(const BackgroundProfile& b, cplx lambda)
{
    cplx a;
    if (b.shape == BackgroundProfile::Shape::gaussian) {
        cplx u = (lambda - b.center) / b.width;
        a = b.amplitude * std::exp(-u * u);
    } else {
        a = b.amplitude;
        for (double w : b.widths) a *= w * w / ((lambda - b.center) * (lambda - b.center) + w * w);
    }
    if (b.onset > 0)
        for (int i = 0; i < b.onset_power; ++i) a *= lambda * lambda / (lambda * lambda + b.onset * b.onset);
    cplx delta = 0.0, p = 1.0;
    for (double c : b.phase) {
        delta += c * p;
        p *= lambda;
    }
    return a * std::exp(2.0 * cplx(0, 1) * delta);
}

inline cplx evaluate(const SyntheticModel& m, cplx lambda, cplx e)
{
    cplx s = background(m.background, lambda);
    for (const auto& p : m.poles) s *= (lambda - p.zero_at(e)) / (lambda - p.at(e));
    for (const auto& z : m.zeros) s *= (lambda - z.at(e)) / (lambda - z.conj_at(e));
    return s;
}

inline cplx exact_residue(const SyntheticModel& m, long pole_index, double e)
{
    if (pole_index < 0 || static_cast<std::size_t>(pole_index) >= m.poles.size())
        fail(Errc::index_out_of_range, "pole index " + std::to_string(pole_index) + " outside model");
    const auto& p = m.poles[static_cast<std::size_t>(pole_index)];
    cplx l0 = p.at(e);
    cplx r = background(m.background, l0) * (l0 - p.zero_at(e));
    for (std::size_t i = 0; i < m.poles.size(); ++i)
        if (i != static_cast<std::size_t>(pole_index)) r *= (l0 - m.poles[i].zero_at(e)) / (l0 - m.poles[i].at(e));
    for (const auto& z : m.zeros) r *= (l0 - z.at(e)) / (l0 - z.conj_at(e));
    return r;
}

// Complex energy where lambda0(E) = J + 1/2.
inline cplx exact_ce_pole(const SyntheticModel& m, std::size_t pole_index, double J)
{
    const auto& p = m.poles.at(pole_index);
    cplx target = J + 0.5;
    if (p.gamma == cplx(0.0)) return (target - p.alpha) / p.beta;
    // gamma E^2 + (beta - 2 gamma e_ref) E + (alpha + gamma e_ref^2 - target) = 0
    cplx qa = p.gamma, qb = p.beta - 2.0 * p.gamma * p.e_ref, qc = p.alpha + p.gamma * p.e_ref * p.e_ref - target;
    cplx disc = std::sqrt(qb * qb - 4.0 * qa * qc);
    cplx r1 = (-qb + disc) / (2.0 * qa), r2 = (-qb - disc) / (2.0 * qa);
    cplx guess = (target - p.alpha) / p.beta;
    return std::abs(r1 - guess) < std::abs(r2 - guess) ? r1 : r2;
}

struct LedgerPole {
    std::string label;
    cplx position;
    cplx residue;
};

struct LedgerEntry {
    double energy;
    std::vector<LedgerPole> poles;
    std::vector<cplx> zeros;
};

struct Ledger {
    std::vector<LedgerEntry> entries;
};

struct Generated {
    PartialWaveTable table;
    Ledger ledger;
};

inline Generated generate(const SyntheticModel& m, const TableOptions& opt = {})
{
    if (m.energies.empty()) fail(Errc::invalid_argument, "model has no energies");
    Ledger ledger;
    for (double e : m.energies) {
        LedgerEntry entry{e, {}, {}};
        for (std::size_t i = 0; i < m.poles.size(); ++i) {
            const auto& p = m.poles[i];
            cplx l0 = p.at(e);
            if (std::abs(l0.imag()) < 1e-12)
                fail(Errc::pole_on_real_axis, "pole " + (p.label.empty() ? std::to_string(i) : p.label) +
                                                  " lies on the real axis at E=" + fmt(e));
            entry.poles.push_back({p.label.empty() ? "P" + std::to_string(i + 1) : p.label, l0,
                                   exact_residue(m, static_cast<long>(i), e)});
            if (p.strength != 0.0) entry.zeros.push_back(p.zero_at(e));
        }
        for (const auto& z : m.zeros) entry.zeros.push_back(z.at(e));
        ledger.entries.push_back(std::move(entry));
    }
    std::vector<double> ks;
    std::vector<cplx> s;
    for (double e : m.energies) {
        ks.push_back(m.k_at(e));
        for (int j = 0; j <= m.jmax; ++j) s.push_back(evaluate(m, j + 0.5, e));
    }
    TableOptions o = opt;
    o.jmax_warn = 0;
    return {PartialWaveTable(m.transition, m.energies, std::move(ks), m.jmax, std::move(s), o), std::move(ledger)};
}

// Multiplicative complex noise S -> S (1 + eps (u1 + i u2)), u uniform on [-1, 1].
inline PartialWaveTable add_noise(const PartialWaveTable& t, double eps, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> s = t.values();
    for (auto& v : s) {
        double a = u(rng), b = u(rng);
        v *= cplx(1.0 + eps * a, eps * b);
    }
    TableOptions o;
    o.jmax_warn = 0;
    o.unitarity_tol = std::max(1e-6, 4 * eps);
    return PartialWaveTable(t.transition(), t.energies(), t.k(), t.jmax(), std::move(s), o);
}

// Inverse of model_from_json.
inline nlohmann::ordered_json model_to_json(const SyntheticModel& m)
{
    using nlohmann::ordered_json;
    auto c = [](cplx v) { return ordered_json::array({v.real(), v.imag()}); };
    ordered_json j;
    j["transition"] = m.transition.str();
    j["jmax"] = m.jmax;
    j["k_scale"] = m.k_scale;
    j["energies"] = m.energies;
    ordered_json b;
    b["shape"] = m.background.shape == BackgroundProfile::Shape::gaussian ? "gaussian" : "lorentzian_product";
    b["amplitude"] = m.background.amplitude;
    b["center"] = m.background.center;
    b["width"] = m.background.width;
    b["widths"] = m.background.widths;
    b["phase"] = m.background.phase;
    b["onset"] = m.background.onset;
    b["onset_power"] = m.background.onset_power;
    j["background"] = b;
    auto poles = ordered_json::array();
    for (const auto& p : m.poles)
        poles.push_back({{"label", p.label},
                         {"alpha", c(p.alpha)},
                         {"beta", c(p.beta)},
                         {"gamma", c(p.gamma)},
                         {"e_ref", p.e_ref},
                         {"strength", p.strength}});
    j["poles"] = poles;
    auto zeros = ordered_json::array();
    for (const auto& z : m.zeros) zeros.push_back({{"alpha", c(z.alpha)}, {"beta", c(z.beta)}});
    j["zeros"] = zeros;
    return j;
}

inline nlohmann::ordered_json ledger_to_json(const SyntheticModel& m, const Ledger& l)
{
    using nlohmann::ordered_json;
    auto c = [](cplx v) { return ordered_json::array({v.real(), v.imag()}); };
    ordered_json j;
    j["model"] = model_to_json(m);
    j["transition"] = m.transition.str();
    j["jmax"] = m.jmax;
    auto entries = ordered_json::array();
    for (const auto& e : l.entries) {
        ordered_json je;
        je["E_meV"] = e.energy;
        auto poles = ordered_json::array();
        for (const auto& p : e.poles) {
            ordered_json jp;
            jp["label"] = p.label;
            jp["position"] = c(p.position);
            jp["residue"] = c(p.residue);
            poles.push_back(std::move(jp));
        }
        je["poles"] = std::move(poles);
        auto zeros = ordered_json::array();
        for (auto z : e.zeros) zeros.push_back(c(z));
        je["zeros"] = std::move(zeros);
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    auto traj = ordered_json::array();
    for (std::size_t i = 0; i < m.poles.size(); ++i) {
        const auto& p = m.poles[i];
        ordered_json jt;
        jt["label"] = p.label.empty() ? "P" + std::to_string(i + 1) : p.label;
        jt["alpha"] = c(p.alpha);
        jt["beta"] = c(p.beta);
        jt["gamma"] = c(p.gamma);
        jt["e_ref"] = p.e_ref;
        jt["strength"] = p.strength;
        auto ce = ordered_json::array();
        for (int J = 0; J <= m.jmax && (p.beta != cplx(0.0) || p.gamma != cplx(0.0)); ++J) {
            cplx v = exact_ce_pole(m, i, J);
            ce.push_back(ordered_json{{"J", J}, {"E", c(v)}});
        }
        jt["ce_poles"] = std::move(ce);
        traj.push_back(std::move(jt));
    }
    j["trajectories"] = std::move(traj);
    return j;
}

namespace detail {

inline cplx read_c(const nlohmann::json& j)
{
    if (j.is_number()) return j.get<double>();
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace detail

// Model description used by the `synth` subcommand.
inline SyntheticModel model_from_json(const nlohmann::json& j)
{
    SyntheticModel m;
    try {
        if (j.contains("transition")) m.transition = TransitionLabel::parse(j["transition"].get<std::string>());
        m.jmax = j.value("jmax", 40);
        m.k_scale = j.value("k_scale", 0.1);
        if (j.contains("energies"))
            m.energies = j["energies"].get<std::vector<double>>();
        else
            m.energies = default_energy_grid(static_cast<std::size_t>(j.value("n_energies", 17)));
        if (j.contains("background")) {
            const auto& b = j["background"];
            auto shape = b.value("shape", std::string("gaussian"));
            if (shape == "gaussian")
                m.background.shape = BackgroundProfile::Shape::gaussian;
            else if (shape == "lorentzian_product")
                m.background.shape = BackgroundProfile::Shape::lorentzian_product;
            else
                fail(Errc::config, "unknown background shape '" + shape + "'");
            m.background.amplitude = b.value("amplitude", 1.0);
            m.background.center = b.value("center", 0.0);
            m.background.width = b.value("width", 10.0);
            if (b.contains("widths")) m.background.widths = b["widths"].get<std::vector<double>>();
            if (b.contains("phase")) m.background.phase = b["phase"].get<std::vector<double>>();
            m.background.onset = b.value("onset", 0.0);
            m.background.onset_power = b.value("onset_power", 1);
        }
        if (j.contains("poles"))
            for (const auto& p : j["poles"]) {
                PoleTrajectory t;
                t.alpha = detail::read_c(p.at("alpha"));
                t.beta = detail::read_c(p.at("beta"));
                if (p.contains("gamma")) t.gamma = detail::read_c(p["gamma"]);
                t.e_ref = p.value("e_ref", 0.0);
                t.strength = p.value("strength", 1.0);
                t.label = p.value("label", std::string());
                m.poles.push_back(t);
            }
        if (j.contains("zeros"))
            for (const auto& z : j["zeros"]) m.zeros.push_back({detail::read_c(z.at("alpha")), detail::read_c(z.at("beta"))});
    } catch (const nlohmann::json::exception& ex) {
        fail(Errc::config, std::string("bad model description: ") + ex.what());
    }
    return m;
}

// Pole trajectory passing through lambda_ref at e_ref with slope beta.
inline PoleTrajectory through(cplx lambda_ref, double e_ref, cplx beta, std::string label, cplx gamma = 0.0)
{
    PoleTrajectory p;
    p.alpha = lambda_ref - beta * e_ref;
    p.beta = beta;
    p.gamma = gamma;
    p.e_ref = e_ref;
    p.label = std::move(label);
    return p;
}

// Rational background with no poles inside the default search box.
inline BackgroundProfile smooth_background(int jmax)
{
    BackgroundProfile b;
    b.shape = BackgroundProfile::Shape::lorentzian_product;
    if (jmax >= 30) {
        b.center = 13.0;
        b.widths = {6.0, 7.0, 8.0};
    } else {
        b.center = 10.0;
        b.widths = {5.0, 6.0};
    }
    b.phase = {0.3, 0.05};
    return b;
}

inline std::vector<std::string> preset_names()
{
    return {"no-pole-40",   "one-pole-20",  "one-pole-40",       "two-pole-20",        "two-pole-40",
            "three-pole-40", "pole-zero-40", "curved-40",         "one-pole-40-gauss", "two-pole-40-gauss"};
}

// Named models used by the tests, the acceptance run and `synth --preset`. The "-gauss"
// variants use a Gaussian background that is negligible at both lambda = 0 and J_max.
inline SyntheticModel preset(const std::string& name)
{
    SyntheticModel m;
    m.energies = default_energy_grid();
    const double e0 = m.energies.front();
    auto set_jmax = [&](int j) {
        m.jmax = j;
        m.background = smooth_background(j);
    };
    auto gauss = [&] {
        m.background.shape = BackgroundProfile::Shape::gaussian;
        m.background.center = 14.0;
        m.background.width = 5.0;
        m.background.widths.clear();
    };
    const cplx slope{0.08, 0.002};
    if (name == "no-pole-40") {
        set_jmax(40);
    } else if (name == "one-pole-20" || name == "one-pole-40" || name == "one-pole-40-gauss") {
        set_jmax(name == "one-pole-20" ? 20 : 40);
        m.poles.push_back(through({13.0, 0.9}, e0, slope, "II"));
        if (name == "one-pole-40-gauss") gauss();
    } else if (name == "two-pole-20") {
        set_jmax(20);
        m.poles.push_back(through({12.0, 0.9}, e0, {0.07, 0.002}, "II"));
        m.poles.push_back(through({16.0, 2.0}, e0, {0.05, 0.001}, "III"));
    } else if (name == "two-pole-40" || name == "two-pole-40-gauss") {
        set_jmax(40);
        m.poles.push_back(through({12.49, 0.95}, e0, slope, "II"));
        m.poles.push_back(through({9.0, 1.6}, e0, {0.12, 0.004}, "I"));
        if (name == "two-pole-40-gauss") gauss();
    } else if (name == "three-pole-40") {
        set_jmax(40);
        m.poles.push_back(through({8.0, 0.5}, e0, {0.05, 0.0}, "A"));
        m.poles.push_back(through({13.0, 0.95}, e0, slope, "B"));
        m.poles.push_back(through({17.0, 1.8}, e0, {0.06, 0.001}, "C"));
    } else if (name == "pole-zero-40") {
        set_jmax(40);
        m.poles.push_back(through({13.0, 0.9}, e0, slope, "II"));
        m.zeros.push_back({cplx(10.0, 1.5) - cplx(0.03, 0.0) * e0, {0.03, 0.0}});
    } else if (name == "curved-40") {
        set_jmax(40);
        m.poles.push_back(through({13.0, 0.9}, e0, slope, "II", {1e-4, 0.0}));
    } else {
        fail(Errc::config, "unknown synthetic preset '" + name + "'");
    }
    return m;
}

}  // namespace regge::synth
