#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "amplitudes.hpp"
#include "errors.hpp"
#include "pade.hpp"

namespace regge {

enum class TailKind { f, g };

struct LabeledPole {
    std::string label;
    PoleDatum pole;
};

// 2 pi i w(lambda_n) r_n exp(i lambda_n phi), w = sqrt for f~, identity for g~.
inline cplx tail(const PoleDatum& p, TailKind kind, double phi)
{
    if (p.axis != Axis::j_at_fixed_e) fail(Errc::invalid_argument, "tail needs a CAM-plane pole");
    if (p.significance == Significance::spurious)
        fail(Errc::spurious_pole, "pole at " + fmt(p.position.real()) + "+" + fmt(p.position.imag()) + "i is spurious");
    if (phi < 0) fail(Errc::invalid_argument, "tail is defined for phi >= 0");
    const cplx w = kind == TailKind::f ? std::sqrt(p.position) : p.position;
    return 2.0 * pi * I * w * p.residue * std::exp(I * p.position * phi);
}

struct TailResidual {
    std::vector<double> phi;
    std::vector<double> energies;
    std::vector<std::vector<double>> delta_f;  // [energy][phi]
    std::vector<std::vector<double>> delta_g;
    std::vector<double> max_f, rms_f, max_g, rms_g;  // over phi >= phi_min
};

inline TailResidual subtract_tails(const UnfoldedAmplitude& u, const std::vector<std::vector<PoleDatum>>& poles,
                                   double phi_min = pi)
{
    TailResidual r;
    r.phi = u.phi;
    r.energies = u.energies;
    for (std::size_t e = 0; e < u.energies.size(); ++e) {
        std::vector<double> df, dg;
        double mf = 0, mg = 0, sf = 0, sg = 0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < u.phi.size(); ++i) {
            const double x = u.phi[i];
            double tf = 0, tg = 0;
            if (x >= phi_min && e < poles.size()) {
                cplx sumf = 0.0, sumg = 0.0;
                for (const auto& p : poles[e]) {
                    if (p.significance == Significance::spurious) continue;
                    sumf += tail(p, TailKind::f, x);
                    sumg += tail(p, TailKind::g, x);
                }
                tf = std::abs(sumf);
                tg = std::abs(sumg);
            }
            df.push_back(std::abs(u.f[e][i]) - tf);
            dg.push_back(std::abs(u.g[e][i]) - tg);
            if (x >= phi_min) {
                mf = std::max(mf, std::abs(df.back()));
                mg = std::max(mg, std::abs(dg.back()));
                sf += df.back() * df.back();
                sg += dg.back() * dg.back();
                ++n;
            }
        }
        r.delta_f.push_back(std::move(df));
        r.delta_g.push_back(std::move(dg));
        r.max_f.push_back(mf);
        r.max_g.push_back(mg);
        r.rms_f.push_back(n ? std::sqrt(sf / static_cast<double>(n)) : 0.0);
        r.rms_g.push_back(n ? std::sqrt(sg / static_cast<double>(n)) : 0.0);
    }
    return r;
}

struct DecompositionTerm {
    std::string label;
    cplx value;
    double abs2 = 0;
    double residual = 0;  // abs2 - exact_abs2
};

struct DecompositionRow {
    double energy = 0;
    cplx exact;
    double exact_abs2 = 0;
    std::vector<DecompositionTerm> terms;

    const DecompositionTerm* find(const std::string& label) const
    {
        for (const auto& t : terms)
            if (t.label == label) return &t;
        return nullptr;
    }
};

// Term labels: "exact", individual contributions ("m0", "background", "direct", "pole:<L>")
// and coherent approximations "approx:<parts joined by +>".
struct DecompositionReport {
    std::string tag;
    std::vector<DecompositionRow> rows;

    double max_abs_residual(const std::string& label) const
    {
        double m = 0;
        for (const auto& r : rows)
            if (const auto* t = r.find(label)) m = std::max(m, std::abs(t->residual));
        return m;
    }

    double max_exact_abs2() const
    {
        double m = 0;
        for (const auto& r : rows) m = std::max(m, r.exact_abs2);
        return m;
    }
};

namespace detail {

inline void push_term(DecompositionRow& row, std::string label, cplx value)
{
    DecompositionTerm t;
    t.label = std::move(label);
    t.value = value;
    t.abs2 = std::norm(value);
    t.residual = t.abs2 - row.exact_abs2;
    row.terms.push_back(std::move(t));
}

inline void start_row(DecompositionRow& row, double energy, cplx exact)
{
    row.energy = energy;
    row.exact = exact;
    row.exact_abs2 = std::norm(exact);
    push_term(row, "exact", exact);
}

// Individual pole terms plus cumulative coherent sums on top of `base`.
inline void push_pole_series(DecompositionRow& row, const std::vector<LabeledPole>& poles, const std::string& base_label,
                             cplx base, const std::function<cplx(const PoleDatum&)>& term)
{
    std::string label = base_label;
    cplx acc = base;
    if (!base_label.empty()) push_term(row, "approx:" + label, acc);
    if (poles.empty() && base_label.empty()) push_term(row, "approx:none", 0.0);
    for (const auto& p : poles) {
        cplx v = term(p.pole);
        push_term(row, "pole:" + p.label, v);
        acc += v;
        label += (label.empty() ? "" : "+") + p.label;
        push_term(row, "approx:" + label, acc);
    }
}

}  // namespace detail

inline std::string approx_label(const std::string& base, const std::vector<std::string>& labels, std::size_t n)
{
    std::string s = base;
    for (std::size_t i = 0; i < n && i < labels.size(); ++i) s += (s.empty() ? "" : "+") + labels[i];
    return "approx:" + (s.empty() ? std::string("none") : s);
}

inline DecompositionReport decompose_forward(const UnfoldedAmplitude& u, const std::vector<std::vector<LabeledPole>>& poles,
                                             int m_max = 2)
{
    DecompositionReport rep;
    rep.tag = "forward";
    auto exact = fold_endpoint(u, Endpoint::forward, m_max);
    for (std::size_t e = 0; e < u.energies.size(); ++e) {
        const double k = u.k[e];
        DecompositionRow row;
        detail::start_row(row, u.energies[e], exact[e].total);
        detail::push_term(row, "m0", -u.g_at(e, pi) / k);
        static const std::vector<LabeledPole> none;
        detail::push_pole_series(row, e < poles.size() ? poles[e] : none, "", 0.0,
                                 [&](const PoleDatum& p) { return -tail(p, TailKind::g, pi) / k; });
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline DecompositionReport decompose_backward(const UnfoldedAmplitude& u, const std::vector<std::vector<LabeledPole>>& poles,
                                              int m_max = 2)
{
    DecompositionReport rep;
    rep.tag = "backward";
    auto exact = fold_endpoint(u, Endpoint::backward, m_max);
    for (std::size_t e = 0; e < u.energies.size(); ++e) {
        const double k = u.k[e];
        DecompositionRow row;
        detail::start_row(row, u.energies[e], exact[e].total);
        const cplx direct = u.g_at(e, 0.0) / (I * k);
        detail::push_term(row, "direct", direct);
        static const std::vector<LabeledPole> none;
        detail::push_pole_series(row, e < poles.size() ? poles[e] : none, "direct", direct,
                                 [&](const PoleDatum& p) { return -tail(p, TailKind::g, 2 * pi) / (I * k); });
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline DecompositionReport decompose_sideway(const FoldedAmplitude& folded, const std::vector<std::vector<LabeledPole>>& poles,
                                             double theta)
{
    std::size_t it = folded.theta.size();
    for (std::size_t i = 0; i < folded.theta.size(); ++i)
        if (std::abs(folded.theta[i] - theta) <= 1e-12) it = i;
    if (it == folded.theta.size())
        fail(Errc::phi_out_of_grid, "theta=" + fmt(rad2deg(theta)) + " deg is not on the folded grid");
    DecompositionReport rep;
    rep.tag = "sideway:" + fmt(rad2deg(theta));
    for (std::size_t e = 0; e < folded.energies.size(); ++e) {
        const auto& pt = folded.points[e][it];
        if (pt.endpoint) fail(Errc::endpoint_theta, "theta=" + fmt(rad2deg(theta)) + " deg was routed to the endpoint sums");
        const double k = folded.k[e];
        DecompositionRow row;
        detail::start_row(row, folded.energies[e], pt.total);
        cplx bg = 0.0;
        for (const auto& t : pt.terms) {
            if (t.m <= 0) bg += t.value;
            if (t.m == 1) detail::push_term(row, "m1", t.value);
        }
        detail::push_term(row, "background", bg);
        const cplx pref = 1.0 / (I * k * std::sqrt(2 * pi * std::sin(theta))) * std::polar(1.0, -pi / 4 - pi / 2);
        const double phi1 = winding_angle(theta, 1);
        static const std::vector<LabeledPole> none;
        detail::push_pole_series(row, e < poles.size() ? poles[e] : none, "bg", bg,
                                 [&](const PoleDatum& p) { return pref * tail(p, TailKind::f, phi1); });
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace regge
