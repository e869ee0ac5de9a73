#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "format.hpp"

namespace regge {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 14;
    double panel_width = 0.5;
    double lambda_cut = 0.0;         // 0: J_max + 1/2
    double remainder_target = 0.0;   // > 0: extend lambda_cut until |remainder| drops below this
    double lambda_cut_max = 0.0;     // 0: 4 * lambda_cut
};

// f~ and g~ at one winding angle.
struct UnfoldPoint {
    cplx f;
    cplx g;
    double err_f = 0;
    double err_g = 0;
    double lambda_cut = 0;
    cplx remainder_f;
    cplx remainder_g;

    double err() const { return std::max(err_f, err_g); }
};

namespace detail {

struct Gk21 {
    std::array<double, 21> x{};   // on [-1, 1]
    std::array<double, 21> wk{};
    std::array<double, 21> wg{};  // zero at Kronrod-only nodes

    Gk21()
    {
        using boost::math::quadrature::gauss;
        using boost::math::quadrature::gauss_kronrod;
        const auto& ax = gauss_kronrod<double, 21>::abscissa();
        const auto& w = gauss_kronrod<double, 21>::weights();
        const auto& gw = gauss<double, 10>::weights();
        std::size_t n = 0;
        for (std::size_t i = ax.size(); i-- > 1;) {
            x[n] = -ax[i];
            wk[n] = w[i];
            wg[n] = (i % 2 == 1) ? gw[i / 2] : 0.0;
            ++n;
        }
        for (std::size_t i = 0; i < ax.size(); ++i) {
            x[n] = ax[i];
            wk[n] = w[i];
            wg[n] = (i % 2 == 1) ? gw[i / 2] : 0.0;
            ++n;
        }
    }
};

inline const Gk21& gk21()
{
    static const Gk21 rule;
    return rule;
}

}  // namespace detail

// Evaluates f~(phi) = int_0^inf sqrt(l) S(l) e^{i l phi} dl and g~ (weight l) for one S.
// S values at the nodes of the base panels are cached on construction.
class OscillatoryIntegrator {
public:
    OscillatoryIntegrator(std::function<cplx(double)> s, const QuadratureConfig& cfg, double lambda_cut)
        : s_(std::move(s)), cfg_(cfg), cut_(lambda_cut)
    {
        if (!(cut_ > 0)) fail(Errc::invalid_argument, "lambda_cut must be positive");
        if (!(cfg_.panel_width > 0) || !(cfg_.abs_tol > 0) || !(cfg_.rel_tol > 0))
            fail(Errc::invalid_argument, "quadrature tolerances and panel width must be positive");
        build_base(cut_);
    }

    UnfoldPoint operator()(double phi) const
    {
        double cut = cut_;
        UnfoldPoint out = integrate(phi, cut);
        if (cfg_.remainder_target > 0) {
            const double cut_max = cfg_.lambda_cut_max > 0 ? cfg_.lambda_cut_max : 4 * cut_;
            while (std::max(std::abs(out.remainder_f), std::abs(out.remainder_g)) >= cfg_.remainder_target &&
                   cut + cfg_.panel_width <= cut_max + 1e-12) {
                cut += cfg_.panel_width;
                out = integrate(phi, cut);
            }
        }
        return out;
    }

    double lambda_cut() const { return cut_; }
    cplx s(double lambda) const { return s_(lambda); }

private:
    struct Panel {
        double a, b;
        bool substituted;            // lambda = u^2 on [0, b]
        std::array<cplx, 21> s;
        std::array<double, 21> lambda;
        std::array<double, 21> jac;  // d lambda / d(node) times half-width
    };

    void fill_nodes(Panel& p) const
    {
        const auto& r = detail::gk21();
        if (p.substituted) {
            const double ub = std::sqrt(p.b), ua = std::sqrt(p.a);
            const double c = 0.5 * (ua + ub), h = 0.5 * (ub - ua);
            for (std::size_t i = 0; i < 21; ++i) {
                double u = c + h * r.x[i];
                p.lambda[i] = u * u;
                p.jac[i] = 2 * u * h;
            }
        } else {
            const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
            for (std::size_t i = 0; i < 21; ++i) {
                p.lambda[i] = c + h * r.x[i];
                p.jac[i] = h;
            }
        }
    }

    Panel make_panel(double a, double b, bool substituted) const
    {
        Panel p{a, b, substituted, {}, {}, {}};
        fill_nodes(p);
        for (std::size_t i = 0; i < 21; ++i) p.s[i] = s_(p.lambda[i]);
        return p;
    }

    void build_base(double cut)
    {
        base_.clear();
        const double w = cfg_.panel_width;
        double a = 0;
        while (a < cut - 1e-12) {
            double b = std::min(cut, a + w);
            base_.push_back(make_panel(a, b, a == 0.0));
            a = b;
        }
    }

    struct Acc {
        cplx kf, kg, gf, gg;
        double l1f = 0, l1g = 0;
    };

    static Acc apply(const Panel& p, double phi)
    {
        const auto& r = detail::gk21();
        Acc acc;
        for (std::size_t i = 0; i < 21; ++i) {
            const double l = p.lambda[i];
            const cplx e = p.s[i] * std::polar(p.jac[i], l * phi);
            const cplx vf = std::sqrt(l) * e;
            const cplx vg = l * e;
            acc.kf += r.wk[i] * vf;
            acc.kg += r.wk[i] * vg;
            acc.gf += r.wg[i] * vf;
            acc.gg += r.wg[i] * vg;
            acc.l1f += r.wk[i] * std::abs(vf);
            acc.l1g += r.wk[i] * std::abs(vg);
        }
        return acc;
    }

    // Adaptive bisection of one panel; returns false if depth ran out.
    bool refine(const Panel& p, double phi, int depth, double total_width, UnfoldPoint& out) const
    {
        Acc acc = apply(p, phi);
        const double frac = (p.b - p.a) / total_width;
        const double ef = std::abs(acc.kf - acc.gf), eg = std::abs(acc.kg - acc.gg);
        const double floor_f = 50 * std::numeric_limits<double>::epsilon() * acc.l1f;
        const double floor_g = 50 * std::numeric_limits<double>::epsilon() * acc.l1g;
        const bool ok_f = ef <= std::max({cfg_.abs_tol * frac, cfg_.rel_tol * std::abs(acc.kf), floor_f});
        const bool ok_g = eg <= std::max({cfg_.abs_tol * frac, cfg_.rel_tol * std::abs(acc.kg), floor_g});
        if ((ok_f && ok_g) || depth >= cfg_.max_depth) {
            out.f += acc.kf;
            out.g += acc.kg;
            out.err_f += ef;
            out.err_g += eg;
            return ok_f && ok_g;
        }
        const double m = 0.5 * (p.a + p.b);
        bool good = refine(make_panel(p.a, m, p.substituted), phi, depth + 1, total_width, out);
        good = refine(make_panel(m, p.b, p.substituted), phi, depth + 1, total_width, out) && good;
        return good;
    }

    UnfoldPoint integrate(double phi, double cut) const
    {
        UnfoldPoint out;
        out.lambda_cut = cut;
        bool good = true;
        for (const auto& p : base_) good = refine(p, phi, 0, cut, out) && good;
        double a = cut_;
        while (a < cut - 1e-12) {
            double b = std::min(cut, a + cfg_.panel_width);
            good = refine(make_panel(a, b, false), phi, 0, cut, out) && good;
            a = b;
        }
        if (!good)
            fail(Errc::quadrature_not_converged,
                 "panel bisection exhausted at phi=" + fmt(phi) + " rad (depth " + std::to_string(cfg_.max_depth) + ")");
        add_remainder(phi, cut, out);
        return out;
    }

    // One integration-by-parts step beyond the cut, h(l) = w(l) S(l) modelled as locally exponential:
    // int_L^inf h e^{i phi l} dl ~ -h(L) e^{i phi L} / (i phi + kappa), kappa = h'/h.
    void add_remainder(double phi, double cut, UnfoldPoint& out) const
    {
        const double d = 1e-3 * std::max(1.0, cut);
        const cplx s0 = s_(cut), sp = s_(cut + d), sm = s_(cut - d);
        auto one = [&](auto weight, cplx& rem, double& err) {
            const cplx h0 = weight(cut) * s0, hp = weight(cut + d) * sp, hm = weight(cut - d) * sm;
            if (h0 == cplx(0.0)) {
                rem = 0.0;
                return;
            }
            const cplx kappa = (hp - hm) / (2 * d * h0);
            const cplx kappa_d = (hp - 2.0 * h0 + hm) / (d * d * h0) - kappa * kappa;
            const cplx den = cplx(0, phi) + kappa;
            if (std::abs(den) < 1e-12) {
                rem = 0.0;
                err += std::abs(h0) * cut;
                return;
            }
            rem = -h0 * std::polar(1.0, phi * cut) / den;
            err += std::abs(rem) * std::abs(kappa_d) / std::norm(den);
        };
        one([](double l) { return std::sqrt(l); }, out.remainder_f, out.err_f);
        one([](double l) { return l; }, out.remainder_g, out.err_g);
        out.f += out.remainder_f;
        out.g += out.remainder_g;
    }

    std::function<cplx(double)> s_;
    QuadratureConfig cfg_;
    double cut_;
    std::vector<Panel> base_;
};

}  // namespace regge
