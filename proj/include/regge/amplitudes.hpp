#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "format.hpp"
#include "pade.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "smatrix_io.hpp"

namespace regge {

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

inline double deg2rad(double d) { return d * pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / pi; }

// P_0..P_jmax at x by the upward three-term recurrence.
inline std::vector<double> legendre_table(double x, int jmax)
{
    std::vector<double> p(static_cast<std::size_t>(jmax) + 1);
    p[0] = 1.0;
    if (jmax >= 1) p[1] = x;
    for (int n = 1; n < jmax; ++n)
        p[static_cast<std::size_t>(n) + 1] =
            ((2.0 * n + 1.0) * x * p[static_cast<std::size_t>(n)] - n * p[static_cast<std::size_t>(n) - 1]) / (n + 1.0);
    return p;
}

struct AngularGrid {
    std::vector<double> theta;  // radians, ascending in [0, pi]

    static AngularGrid degrees(double from, double to, double step)
    {
        if (!(step > 0) || to < from || from < 0 || to > 180.0 + 1e-9)
            fail(Errc::invalid_argument, "theta grid must satisfy 0 <= from <= to <= 180 with step > 0");
        AngularGrid g;
        const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
        for (long i = 0; i <= n; ++i) g.theta.push_back(deg2rad(std::min(from + static_cast<double>(i) * step, 180.0)));
        if (std::abs(rad2deg(g.theta.back()) - to) > 1e-9 * std::max(1.0, to)) g.theta.push_back(deg2rad(to));
        return g;
    }

    bool includes_forward() const { return !theta.empty() && theta.front() == 0.0; }
    bool includes_backward() const { return !theta.empty() && theta.back() == pi; }
};

struct DcsSurface {
    std::vector<double> energies;
    std::vector<double> theta;
    std::vector<std::vector<cplx>> amplitude;  // [energy][theta]
    std::vector<std::vector<double>> sigma;
};

inline cplx direct_amplitude(const PartialWaveTable& t, std::size_t e, double theta)
{
    const auto p = legendre_table(std::cos(pi - theta), t.jmax());
    cplx sum = 0.0;
    for (int j = 0; j <= t.jmax(); ++j) sum += (j + 0.5) * t.s(e, j) * p[static_cast<std::size_t>(j)];
    return sum / (I * t.k()[e]);
}

inline DcsSurface dcs_direct(const PartialWaveTable& t, const AngularGrid& grid)
{
    DcsSurface out;
    out.energies = t.energies();
    out.theta = grid.theta;
    for (std::size_t e = 0; e < t.n_energies(); ++e) {
        std::vector<cplx> amp;
        std::vector<double> sig;
        for (double th : grid.theta) {
            cplx f = direct_amplitude(t, e, th);
            amp.push_back(f);
            sig.push_back(std::norm(f));
        }
        out.amplitude.push_back(std::move(amp));
        out.sigma.push_back(std::move(sig));
    }
    return out;
}

struct PhiGrid {
    std::vector<double> phi;  // radians, ascending

    static PhiGrid degrees(double from, double to, double step)
    {
        if (!(step > 0) || !(to > from)) fail(Errc::invalid_argument, "phi grid needs from < to and step > 0");
        PhiGrid g;
        const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
        for (long i = 0; i <= n; ++i) g.phi.push_back(deg2rad(from + static_cast<double>(i) * step));
        if (std::abs(rad2deg(g.phi.back()) - to) > 1e-9 * std::max(1.0, std::abs(to))) g.phi.push_back(deg2rad(to));
        return g;
    }

    // Range needed to fold with |m| <= m_max, endpoints included.
    static PhiGrid for_fold(int m_max, double step_deg = 0.5, double phi_max_deg = 540.0)
    {
        const double lo = -360.0 * std::max(m_max, 1) / 2.0 * 2.0;
        const double hi = std::max(phi_max_deg, 180.0 * (2 * m_max + 1));
        return degrees(std::min(lo, -180.0), hi, step_deg);
    }
};

// Exact f~/g~ evaluation per energy; shared by every UnfoldedAmplitude built from it.
class UnfoldEngine {
public:
    UnfoldEngine(std::vector<OscillatoryIntegrator> per_energy) : integrators_(std::move(per_energy)) {}

    UnfoldPoint evaluate(std::size_t e, double phi) const { return integrators_.at(e)(phi); }
    std::size_t size() const { return integrators_.size(); }
    const OscillatoryIntegrator& integrator(std::size_t e) const { return integrators_.at(e); }

private:
    std::vector<OscillatoryIntegrator> integrators_;
};

struct UnfoldedAmplitude {
    std::vector<double> phi;
    std::vector<double> energies;
    std::vector<double> k;
    std::vector<std::vector<cplx>> f;  // [energy][phi]
    std::vector<std::vector<cplx>> g;
    std::vector<std::vector<double>> err;
    std::shared_ptr<const UnfoldEngine> engine;

    double phi_min() const { return phi.front(); }
    double phi_max() const { return phi.back(); }
    bool covers(double x) const { return !phi.empty() && x >= phi.front() - 1e-12 && x <= phi.back() + 1e-12; }

    cplx f_at(std::size_t e, double x) const { return at(e, x, true); }
    cplx g_at(std::size_t e, double x) const { return at(e, x, false); }

private:
    cplx at(std::size_t e, double x, bool want_f) const
    {
        if (!covers(x)) fail(Errc::phi_out_of_grid, "phi=" + fmt(rad2deg(x)) + " deg outside the unfolded grid");
        if (engine) {
            auto p = engine->evaluate(e, x);
            return want_f ? p.f : p.g;
        }
        const auto& v = want_f ? f[e] : g[e];
        // cubic Lagrange through the four nearest grid points
        const auto n = phi.size();
        if (n == 1) return v[0];
        auto it = std::lower_bound(phi.begin(), phi.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - phi.begin());
        if (hi < n && phi[hi] == x) return v[hi];
        std::size_t lo = hi == 0 ? 0 : hi - 1;
        std::size_t start = lo >= 1 ? lo - 1 : 0;
        std::size_t count = std::min<std::size_t>(4, n);
        if (start + count > n) start = n - count;
        cplx acc = 0.0;
        for (std::size_t i = start; i < start + count; ++i) {
            double w = 1.0;
            for (std::size_t j = start; j < start + count; ++j)
                if (j != i) w *= (x - phi[j]) / (phi[i] - phi[j]);
            acc += w * v[i];
        }
        return acc;
    }
};

inline double default_lambda_cut(const PartialWaveTable& t, const QuadratureConfig& q)
{
    return q.lambda_cut > 0 ? q.lambda_cut : t.jmax() + 0.5;
}

inline std::vector<RationalApproximant> build_cam_approximants(const PartialWaveTable& t, const BuildOptions& opt = {},
                                                               int threads = 1)
{
    std::vector<RationalApproximant> out(t.n_energies());
    parallel_for(t.n_energies(), threads, [&](std::size_t e) {
        out[e] = build_approximant(slice_at_energy(t, static_cast<long>(e)), Axis::j_at_fixed_e, t.energies()[e], opt);
    });
    return out;
}

inline std::shared_ptr<const UnfoldEngine> make_unfold_engine(const PartialWaveTable& t,
                                                              const std::vector<RationalApproximant>& approximants,
                                                              const QuadratureConfig& q = {})
{
    if (approximants.size() != t.n_energies())
        fail(Errc::invalid_argument, "one approximant per energy is required");
    std::vector<OscillatoryIntegrator> ints;
    const double cut = default_lambda_cut(t, q);
    for (const auto& a : approximants) {
        if (a.axis() != Axis::j_at_fixed_e) fail(Errc::invalid_argument, "unfold needs CAM-axis approximants");
        ints.emplace_back([a](double l) { return a.evaluate(l); }, q, cut);
    }
    return std::make_shared<const UnfoldEngine>(std::move(ints));
}

inline UnfoldedAmplitude unfold(const PartialWaveTable& t, const std::vector<RationalApproximant>& approximants,
                                const PhiGrid& grid, const QuadratureConfig& q = {}, int threads = 1)
{
    if (grid.phi.empty()) fail(Errc::invalid_argument, "empty phi grid");
    UnfoldedAmplitude u;
    u.phi = grid.phi;
    u.energies = t.energies();
    u.k = t.k();
    u.engine = make_unfold_engine(t, approximants, q);
    const auto ne = t.n_energies();
    u.f.assign(ne, {});
    u.g.assign(ne, {});
    u.err.assign(ne, {});
    parallel_for(ne, threads, [&](std::size_t e) {
        std::vector<cplx> fv, gv;
        std::vector<double> ev;
        for (double x : grid.phi) {
            UnfoldPoint p;
            try {
                p = u.engine->evaluate(e, x);
            } catch (const Error& err) {
                if (err.code() == Errc::quadrature_not_converged)
                    fail(err.code(), std::string(err.what()) + " at E=" + fmt(t.energies()[e]) + " meV");
                throw;
            }
            fv.push_back(p.f);
            gv.push_back(p.g);
            ev.push_back(p.err());
        }
        u.f[e] = std::move(fv);
        u.g[e] = std::move(gv);
        u.err[e] = std::move(ev);
    });
    return u;
}

enum class Side { nearside, farside };

struct WindingAngle {
    int m;
    double phi;
    Side side;
};

inline double winding_angle(double theta, int m)
{
    const bool even = (m % 2) == 0;
    return even ? -theta + pi * (m + 1) : theta + pi * m;
}

inline std::vector<WindingAngle> winding_angles(double theta, int m_min, int m_max)
{
    if (!(theta > 0.0 && theta < pi)) fail(Errc::endpoint_theta, "theta=" + fmt(theta) + " rad is an endpoint; use fold_endpoint");
    if (m_min > m_max) fail(Errc::invalid_argument, "empty m range");
    std::vector<WindingAngle> out;
    for (int m = m_min; m <= m_max; ++m)
        out.push_back({m, winding_angle(theta, m), (m % 2 == 0) ? Side::nearside : Side::farside});
    return out;
}

struct FoldOptions {
    int m_max = 2;
    double fold_tol = 1e-3;
    double endpoint_radius = 0.0;  // 0: pi / (2 J_max)
    int jmax = 0;                  // used for the default endpoint radius
    // Significant CAM poles per energy for the truncation bound; empty disables the check.
    std::vector<std::vector<PoleDatum>> poles;
};

struct FoldTerm {
    int m;
    cplx value;
};

struct FoldPoint {
    cplx total;
    std::vector<FoldTerm> terms;
    double remainder_bound = 0;
    bool endpoint = false;
};

struct FoldedAmplitude {
    std::vector<double> theta;
    std::vector<double> energies;
    std::vector<double> k;
    int m_max = 0;
    std::vector<std::vector<FoldPoint>> points;  // [energy][theta]
};

namespace detail {

// Bound on the omitted pole-tail contributions beyond the last retained winding angle.
inline double tail_bound(const std::vector<PoleDatum>& poles, double phi_next, bool g_weight)
{
    double b = 0;
    for (const auto& p : poles) {
        if (p.significance != Significance::significant) continue;
        const double im = p.position.imag();
        if (!(im > 0)) return std::numeric_limits<double>::infinity();
        const double w = g_weight ? std::abs(p.position) : std::sqrt(std::abs(p.position));
        b += 2 * pi * w * std::abs(p.residue) * std::exp(-im * phi_next) * 2.0 / (1.0 - std::exp(-2 * pi * im));
    }
    return b;
}

}  // namespace detail

enum class Endpoint { forward, backward };

struct EndpointAmplitude {
    cplx total;
    std::vector<FoldTerm> terms;
    double remainder_bound = 0;
};

namespace detail {

inline EndpointAmplitude endpoint_sum(const UnfoldedAmplitude& u, std::size_t e, Endpoint which, int m_max,
                                      const std::vector<PoleDatum>* poles)
{
    EndpointAmplitude a;
    const double k = u.k[e];
    const bool forward = which == Endpoint::forward;
    for (int m = -m_max; m <= m_max; ++m) {
        const double x = forward ? (2 * m + 1) * pi : 2 * m * pi;
        if (!u.covers(x))
            fail(Errc::phi_out_of_grid, "phi=" + fmt(rad2deg(x)) + " deg needed for the " +
                                            (forward ? "forward" : "backward") + " sum; extend the phi grid");
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        const cplx term = forward ? -sign * u.g_at(e, x) / k : sign * u.g_at(e, x) / (I * k);
        a.terms.push_back({m, term});
        a.total += term;
    }
    if (poles) {
        const double next = forward ? (2 * m_max + 3) * pi : (2 * m_max + 2) * pi;
        a.remainder_bound = tail_bound(*poles, next, true) / k;
    }
    return a;
}

}  // namespace detail

inline std::vector<EndpointAmplitude> fold_endpoint(const UnfoldedAmplitude& u, Endpoint which, int m_max,
                                                    const std::vector<std::vector<PoleDatum>>& poles = {},
                                                    double fold_tol = 0.0)
{
    if (m_max < 0) fail(Errc::invalid_argument, "m_max must be non-negative");
    std::vector<EndpointAmplitude> out;
    for (std::size_t e = 0; e < u.energies.size(); ++e) {
        auto a = detail::endpoint_sum(u, e, which, m_max, e < poles.size() ? &poles[e] : nullptr);
        if (fold_tol > 0 && a.remainder_bound > fold_tol * std::abs(a.total))
            fail(Errc::truncation_too_coarse,
                 std::string(which == Endpoint::forward ? "forward" : "backward") + " sum with |m|<=" +
                     std::to_string(m_max) + " leaves remainder " + fmt(a.remainder_bound) + " at E=" +
                     fmt(u.energies[e]) + " meV");
        out.push_back(std::move(a));
    }
    return out;
}

inline FoldedAmplitude fold(const UnfoldedAmplitude& u, const std::vector<double>& theta, const FoldOptions& opt = {},
                            int threads = 1)
{
    if (opt.m_max < 0) fail(Errc::invalid_argument, "m_max must be non-negative");
    FoldedAmplitude out;
    out.theta = theta;
    out.energies = u.energies;
    out.k = u.k;
    out.m_max = opt.m_max;
    const double radius = opt.endpoint_radius > 0 ? opt.endpoint_radius : (opt.jmax > 0 ? pi / (2.0 * opt.jmax) : 0.0);
    const std::size_t ne = u.energies.size();
    out.points.assign(ne, {});
    parallel_for(ne, threads, [&](std::size_t e) {
        const double k = u.k[e];
        std::vector<FoldPoint> row;
        std::optional<EndpointAmplitude> fwd, bwd;
        for (double th : theta) {
            FoldPoint pt;
            if (th <= radius || th >= pi - radius) {
                const bool forward = th <= radius;
                auto& cache = forward ? fwd : bwd;
                if (!cache)
                    cache = detail::endpoint_sum(u, e, forward ? Endpoint::forward : Endpoint::backward, opt.m_max,
                                                 e < opt.poles.size() ? &opt.poles[e] : nullptr);
                pt.total = cache->total;
                pt.terms = cache->terms;
                pt.remainder_bound = cache->remainder_bound;
                pt.endpoint = true;
            } else {
                const cplx pref = 1.0 / (I * k * std::sqrt(2 * pi * std::sin(th)));
                for (const auto& w : winding_angles(th, -opt.m_max, opt.m_max)) {
                    if (!u.covers(w.phi))
                        fail(Errc::phi_out_of_grid, "phi_" + std::to_string(w.m) + "=" + fmt(rad2deg(w.phi)) +
                                                        " deg outside the unfolded grid; extend it and rerun");
                    const cplx term = pref * u.f_at(e, w.phi) * std::polar(1.0, -pi / 4 - w.m * pi / 2);
                    pt.terms.push_back({w.m, term});
                    pt.total += term;
                }
                if (e < opt.poles.size())
                    pt.remainder_bound = std::abs(pref) *
                                         detail::tail_bound(opt.poles[e], winding_angle(th, opt.m_max + 1), false);
            }
            row.push_back(std::move(pt));
        }
        if (opt.fold_tol > 0 && e < opt.poles.size()) {
            double scale = 0;
            for (const auto& p : row) scale = std::max(scale, std::abs(p.total));
            for (std::size_t i = 0; i < row.size(); ++i)
                if (row[i].remainder_bound > opt.fold_tol * scale)
                    fail(Errc::truncation_too_coarse,
                         "|m|<=" + std::to_string(opt.m_max) + " leaves remainder " + fmt(row[i].remainder_bound) +
                             " (scale " + fmt(scale) + ") at theta=" + fmt(rad2deg(theta[i])) + " deg, E=" +
                             fmt(u.energies[e]) + " meV; raise m_max");
        }
        out.points[e] = std::move(row);
    });
    return out;
}

// Smallest m_max in [m_min, m_cap] whose pole-tail bounds (interior angles down to sin_min,
// and both endpoints) stay below fold_tol * scale[e].
inline int required_m_max(const std::vector<std::vector<PoleDatum>>& poles, const std::vector<double>& k,
                          const std::vector<double>& scale, double fold_tol, double sin_min, int m_min, int m_cap)
{
    for (int m = m_min; m < m_cap; ++m) {
        bool ok = true;
        for (std::size_t e = 0; e < poles.size() && ok; ++e) {
            const double interior = detail::tail_bound(poles[e], (m + 1) * pi, false) / (k[e] * std::sqrt(2 * pi * sin_min));
            const double ends = detail::tail_bound(poles[e], (2 * m + 2) * pi, true) / k[e];
            ok = std::max(interior, ends) <= fold_tol * scale[e];
        }
        if (ok) return m;
    }
    return m_cap;
}

}  // namespace regge
