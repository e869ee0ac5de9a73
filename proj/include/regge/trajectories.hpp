#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "amplitudes.hpp"
#include "errors.hpp"
#include "pade.hpp"
#include "smatrix_io.hpp"

namespace regge {

inline constexpr double hbar_mev_s = 6.582119569e-13;

struct TrajectoryPoint {
    double energy = 0;
    cplx lambda;
    cplx residue;
};

struct EnergyWindow {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double e) const { return e >= lo && e <= hi; }
};

struct LinearFit {
    cplx alpha;
    cplx beta;  // per meV
    double rms = 0;
    EnergyWindow window;
    std::size_t n = 0;

    cplx at(double e) const { return alpha + beta * e; }
};

struct ReggeTrajectory {
    std::string label;
    std::vector<TrajectoryPoint> points;
    std::optional<LinearFit> fit;
    bool is_short = false;  // fewer than three points, cannot be fitted
};

struct EnergyPoles {
    double energy = 0;
    std::vector<PoleDatum> poles;
};

inline std::vector<ReggeTrajectory> chain_trajectories(const std::vector<EnergyPoles>& per_energy, double match_radius = 1.0)
{
    std::vector<ReggeTrajectory> out;
    std::vector<std::size_t> active;  // trajectories that reached the previous energy
    for (const auto& ep : per_energy) {
        std::vector<const PoleDatum*> poles;
        for (const auto& p : ep.poles)
            if (p.significance != Significance::spurious) poles.push_back(&p);
        std::sort(poles.begin(), poles.end(), [](auto a, auto b) {
            return a->position.real() != b->position.real() ? a->position.real() < b->position.real()
                                                            : a->position.imag() < b->position.imag();
        });

        struct Cand {
            double d;
            double re;
            std::size_t t, p;
        };
        std::vector<Cand> cands;
        for (auto t : active)
            for (std::size_t p = 0; p < poles.size(); ++p) {
                double d = std::abs(poles[p]->position - out[t].points.back().lambda);
                if (d <= match_radius) cands.push_back({d, poles[p]->position.real(), t, p});
            }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.d != b.d) return a.d < b.d;
            if (a.re != b.re) return a.re < b.re;
            return a.t < b.t;
        });

        std::vector<bool> t_used(out.size(), false), p_used(poles.size(), false);
        std::vector<std::size_t> next;
        for (const auto& c : cands) {
            if (t_used[c.t] || p_used[c.p]) continue;
            t_used[c.t] = p_used[c.p] = true;
            out[c.t].points.push_back({ep.energy, poles[c.p]->position, poles[c.p]->residue});
            next.push_back(c.t);
        }
        for (std::size_t p = 0; p < poles.size(); ++p) {
            if (p_used[p]) continue;
            ReggeTrajectory t;
            t.label = "T" + std::to_string(out.size() + 1);
            t.points.push_back({ep.energy, poles[p]->position, poles[p]->residue});
            out.push_back(std::move(t));
            next.push_back(out.size() - 1);
        }
        active = std::move(next);
    }
    for (auto& t : out) t.is_short = t.points.size() < 3;
    return out;
}

inline LinearFit fit_linear(const ReggeTrajectory& traj, const EnergyWindow& window = {})
{
    std::vector<const TrajectoryPoint*> pts;
    for (const auto& p : traj.points)
        if (window.contains(p.energy)) pts.push_back(&p);
    if (pts.size() < 3)
        fail(Errc::too_few_points, "trajectory " + traj.label + " has " + std::to_string(pts.size()) +
                                       " points in the fit window, need 3");
    const double n = static_cast<double>(pts.size());
    double em = 0;
    cplx lm = 0.0;
    for (auto p : pts) {
        em += p->energy;
        lm += p->lambda;
    }
    em /= n;
    lm /= n;
    double sxx = 0;
    cplx sxy = 0.0;
    for (auto p : pts) {
        sxx += (p->energy - em) * (p->energy - em);
        sxy += (p->energy - em) * (p->lambda - lm);
    }
    if (sxx <= 0) fail(Errc::degenerate_samples, "trajectory " + traj.label + " has a single energy in the fit window");
    LinearFit f;
    f.beta = sxy / sxx;
    f.alpha = lm - f.beta * em;
    double ss = 0;
    for (auto p : pts) ss += std::norm(p->lambda - f.at(p->energy));
    f.rms = std::sqrt(ss / n);
    f.window = window;
    f.n = pts.size();
    return f;
}

enum class CeSource { inverted_from_cam, direct_pade_in_e };

inline const char* ce_source_name(CeSource s)
{
    return s == CeSource::inverted_from_cam ? "inverted_from_CAM" : "direct_pade_in_E";
}

struct CEPole {
    double J = 0;
    cplx energy;  // meV
    CeSource source = CeSource::inverted_from_cam;
    std::string trajectory;
};

// E(J) = (J + lambda_shift - alpha) / beta. A fit of lambda = J + 1/2 wants lambda_shift = 0.5.
inline std::vector<CEPole> invert_to_ce(const LinearFit& fit, const std::vector<double>& J_values, double lambda_shift = 0.0,
                                        const std::string& trajectory = {})
{
    if (std::abs(fit.beta) < 1e-12) fail(Errc::beta_near_zero, "|beta| < 1e-12, trajectory is not invertible");
    const cplx a = -fit.alpha / fit.beta;
    const cplx b = 1.0 / fit.beta;
    std::vector<CEPole> out;
    for (double J : J_values) out.push_back({J, a + b * (J + lambda_shift), CeSource::inverted_from_cam, trajectory});
    return out;
}

inline SearchBox default_ce_box(const PartialWaveTable& t)
{
    const double lo = t.energies().front(), hi = t.energies().back();
    const double span = std::max(hi - lo, 1.0);
    return {lo - span, hi + span, -span, span};
}

inline std::vector<CEPole> ce_poles_direct(const PartialWaveTable& table, long J, const SearchBox& box,
                                           const BuildOptions& build = {}, const PoleSearchOptions& search = {})
{
    auto r = build_approximant(slice_at_J(table, J), Axis::e_at_fixed_j, static_cast<double>(J), build);
    std::vector<CEPole> out;
    for (const auto& p : find_poles_zeros(r, box, search).non_spurious())
        out.push_back({static_cast<double>(J), p.position, CeSource::direct_pade_in_e, {}});
    return out;
}

inline std::vector<CEPole> ce_poles_direct(const PartialWaveTable& table, long J)
{
    return ce_poles_direct(table, J, default_ce_box(table));
}

// Flips Im E when most poles sit below the real axis, so resonances carry Im E > 0.
inline bool normalize_ce_signs(std::vector<CEPole>& poles)
{
    std::size_t neg = 0;
    for (const auto& p : poles) neg += p.energy.imag() < 0;
    if (2 * neg <= poles.size()) return false;
    for (auto& p : poles) p.energy = std::conj(p.energy);
    return true;
}

struct ResonanceObservables {
    double lifetime_s = std::numeric_limits<double>::quiet_NaN();
    double angular_life_deg = std::numeric_limits<double>::quiet_NaN();
    double rotational_constant = std::numeric_limits<double>::quiet_NaN();  // meV
    std::optional<double> angular_velocity;
};

inline int j_from_lambda(cplx lambda) { return static_cast<int>(std::lround(lambda.real() - 0.5)); }

inline double rotational_constant(double re_e, double J)
{
    const double jj = J * (J + 1);
    return jj > 0 ? re_e / jj : std::numeric_limits<double>::quiet_NaN();
}

inline double lifetime_s(cplx energy)
{
    if (!(energy.imag() > 0)) fail(Errc::non_positive_imaginary_part, "Im E = " + fmt(energy.imag()) + " meV");
    return hbar_mev_s / (2 * energy.imag());
}

inline double angular_life_deg(cplx lambda)
{
    if (!(lambda.imag() > 0)) fail(Errc::non_positive_imaginary_part, "Im lambda = " + fmt(lambda.imag()));
    return rad2deg(1.0 / (2 * lambda.imag()));
}

// moment is I / hbar in s, so omega comes out in rad/s.
inline ResonanceObservables observables(const CEPole& pole, std::optional<cplx> lambda = {},
                                        std::optional<double> moment = {})
{
    ResonanceObservables o;
    o.lifetime_s = lifetime_s(pole.energy);
    o.rotational_constant = rotational_constant(pole.energy.real(), pole.J);
    if (lambda) {
        o.angular_life_deg = angular_life_deg(*lambda);
        if (moment) o.angular_velocity = lambda->real() / *moment;
    }
    return o;
}

// CAM pole with the energy at which it was found; J for B comes from rounding Re lambda - 1/2.
inline ResonanceObservables observables(cplx lambda, cplx energy, std::optional<double> moment = {})
{
    CEPole p{static_cast<double>(j_from_lambda(lambda)), energy, CeSource::inverted_from_cam, {}};
    return observables(p, lambda, moment);
}

struct CePair {
    double J = 0;
    cplx a, b;  // b already shifted
    double d_re = 0, d_im = 0;
};

struct CeComparison {
    std::vector<CePair> pairs;
    double offset = 0;
    double best_offset = std::numeric_limits<double>::quiet_NaN();
    double rms_re = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> warnings;
};

inline CeComparison compare_ce_sets(const std::vector<CEPole>& set_a, const std::vector<CEPole>& set_b, double offset)
{
    CeComparison c;
    c.offset = offset;
    for (const auto& a : set_a) {
        const CEPole* best = nullptr;
        double best_dj = std::numeric_limits<double>::infinity(), best_de = best_dj;
        for (const auto& b : set_b) {
            double dj = std::abs(a.J - b.J);
            if (dj > 0.5) continue;
            double de = std::abs(a.energy - (b.energy - offset));
            if (dj < best_dj || (dj == best_dj && de < best_de)) {
                best = &b;
                best_dj = dj;
                best_de = de;
            }
        }
        if (!best) continue;
        CePair p;
        p.J = a.J;
        p.a = a.energy;
        p.b = best->energy - offset;
        p.d_re = p.a.real() - p.b.real();
        p.d_im = p.a.imag() - p.b.imag();
        c.pairs.push_back(p);
    }
    if (c.pairs.empty()) {
        c.warnings.push_back("no CE poles share a J value, nothing to compare");
        return c;
    }
    double sum = 0, ss = 0;
    for (const auto& p : c.pairs) {
        sum += -p.d_re + offset;  // Re b - Re a before shifting
        ss += p.d_re * p.d_re;
    }
    const double n = static_cast<double>(c.pairs.size());
    c.best_offset = sum / n;
    c.rms_re = std::sqrt(ss / n);
    return c;
}

}  // namespace regge
