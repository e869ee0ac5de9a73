#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "format.hpp"
#include "polynomial.hpp"
#include "smatrix_io.hpp"

namespace regge {

enum class Axis { j_at_fixed_e, e_at_fixed_j };

inline const char* axis_name(Axis a) { return a == Axis::j_at_fixed_e ? "J_at_fixed_E" : "E_at_fixed_J"; }

struct BuildOptions {
    // A node is skipped when its inverse difference falls below skip_tol relative.
    double skip_tol = 1e-13;
    // Construction stops once the fraction reproduces every unused sample to this relative level.
    double terminate_tol = 1e-13;
};

struct ConstructionLog {
    std::vector<double> skipped_nodes;
    std::vector<std::string> messages;
    bool terminated_early = false;
    double condition_estimate = 1.0;
};

struct NumDen {
    cplx a, b, da, db;
};

// Thiele continued fraction
//   S(z) = a0 + (z - x0) / (a1 + (z - x1) / (a2 + ...))
class RationalApproximant {
public:
    RationalApproximant() = default;
    RationalApproximant(std::vector<Sample> samples, std::vector<double> cf_nodes, std::vector<cplx> cf_coeffs, Axis axis,
                        double anchor, ConstructionLog log)
        : samples_(std::move(samples)), cf_nodes_(std::move(cf_nodes)), cf_coeffs_(std::move(cf_coeffs)), axis_(axis),
          anchor_(anchor), log_(std::move(log))
    {
    }

    cplx operator()(cplx z) const { return evaluate(z); }

    cplx evaluate(cplx z) const
    {
        const auto n = cf_coeffs_.size();
        if (n == 0) return 0.0;
        cplx t = cf_coeffs_[n - 1];
        bool inf = false;
        for (std::size_t k = n - 1; k-- > 0;) {
            if (inf) {
                t = cf_coeffs_[k];
                inf = false;
            } else if (t == cplx(0.0)) {
                cplx d = z - cf_nodes_[k];
                if (d == cplx(0.0)) {
                    t = cf_coeffs_[k];
                } else {
                    inf = true;
                }
            } else {
                t = cf_coeffs_[k] + (z - cf_nodes_[k]) / t;
            }
        }
        if (inf) return {std::numeric_limits<double>::infinity(), 0.0};
        return t;
    }

    // Numerator, denominator and their z-derivatives from the forward recurrence,
    // all sharing one arbitrary overall scale.
    NumDen numden(cplx z) const
    {
        const auto n = cf_coeffs_.size();
        if (n == 0) return {0.0, 1.0, 0.0, 0.0};
        cplx a0 = 1.0, a1 = cf_coeffs_[0], b0 = 0.0, b1 = 1.0;
        cplx da0 = 0.0, da1 = 0.0, db0 = 0.0, db1 = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
            cplx t = z - cf_nodes_[k - 1];
            cplx a2 = cf_coeffs_[k] * a1 + t * a0;
            cplx b2 = cf_coeffs_[k] * b1 + t * b0;
            cplx da2 = cf_coeffs_[k] * da1 + a0 + t * da0;
            cplx db2 = cf_coeffs_[k] * db1 + b0 + t * db0;
            double s = std::max({std::abs(a2), std::abs(b2), std::abs(a1), std::abs(b1)});
            if (!(s > 0) || !std::isfinite(s)) s = 1.0;
            a0 = a1 / s;
            a1 = a2 / s;
            b0 = b1 / s;
            b1 = b2 / s;
            da0 = da1 / s;
            da1 = da2 / s;
            db0 = db1 / s;
            db1 = db2 / s;
        }
        return {a1, b1, da1, db1};
    }

    cplx derivative(cplx z) const
    {
        auto r = numden(z);
        return (r.da * r.b - r.a * r.db) / (r.b * r.b);
    }

    const std::vector<Sample>& samples() const { return samples_; }
    const std::vector<double>& cf_nodes() const { return cf_nodes_; }
    const std::vector<cplx>& cf_coeffs() const { return cf_coeffs_; }
    Axis axis() const { return axis_; }
    double anchor() const { return anchor_; }
    const ConstructionLog& log() const { return log_; }

    double x_min() const { return samples_.front().x; }
    double x_max() const { return samples_.back().x; }
    double max_abs_value() const
    {
        double m = 0;
        for (const auto& s : samples_) m = std::max(m, std::abs(s.s));
        return m;
    }

    // Numerator and denominator coefficients in t = (z - c) / h, ascending powers.
    std::pair<std::vector<cplx>, std::vector<cplx>> polynomials(double c, double h) const
    {
        const auto n = cf_coeffs_.size();
        if (n == 0) return {{0.0}, {1.0}};
        std::vector<cplx> a0{1.0}, a1{cf_coeffs_[0]}, b0{0.0}, b1{1.0};
        for (std::size_t k = 1; k < n; ++k) {
            std::vector<cplx> lin{c - cf_nodes_[k - 1], h};
            auto a2 = poly_add(poly_scale(a1, cf_coeffs_[k]), poly_mul(lin, a0));
            auto b2 = poly_add(poly_scale(b1, cf_coeffs_[k]), poly_mul(lin, b0));
            double s = 0;
            for (auto v : a2) s = std::max(s, std::abs(v));
            for (auto v : b2) s = std::max(s, std::abs(v));
            if (!(s > 0) || !std::isfinite(s)) s = 1.0;
            a0 = poly_scale(a1, 1.0 / s);
            a1 = poly_scale(a2, 1.0 / s);
            b0 = poly_scale(b1, 1.0 / s);
            b1 = poly_scale(b2, 1.0 / s);
        }
        return {a1, b1};
    }

private:
    std::vector<Sample> samples_;
    std::vector<double> cf_nodes_;
    std::vector<cplx> cf_coeffs_;
    Axis axis_ = Axis::j_at_fixed_e;
    double anchor_ = 0;
    ConstructionLog log_;
};

namespace detail {

inline cplx cf_eval_prefix(const std::vector<double>& nodes, const std::vector<cplx>& a, cplx z)
{
    cplx a0 = 1.0, a1 = a[0], b0 = 0.0, b1 = 1.0;
    for (std::size_t k = 1; k < a.size(); ++k) {
        cplx t = z - nodes[k - 1];
        cplx a2 = a[k] * a1 + t * a0;
        cplx b2 = a[k] * b1 + t * b0;
        double s = std::abs(a2) + std::abs(b2);
        if (!(s > 0)) s = 1.0;
        a0 = a1 / s;
        a1 = a2 / s;
        b0 = b1 / s;
        b1 = b2 / s;
    }
    return a1 / b1;
}

}  // namespace detail

inline RationalApproximant build_approximant(std::vector<Sample> samples, Axis axis, double anchor,
                                             const BuildOptions& opt = {})
{
    if (samples.size() < 4) fail(Errc::invalid_argument, "at least 4 samples are required, got " + std::to_string(samples.size()));
    std::stable_sort(samples.begin(), samples.end(), [](const Sample& l, const Sample& r) { return l.x < r.x; });
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].x == samples[i - 1].x) fail(Errc::degenerate_samples, "repeated abscissa " + fmt(samples[i].x));
    for (const auto& s : samples)
        if (!std::isfinite(s.x) || !std::isfinite(s.s.real()) || !std::isfinite(s.s.imag()))
            fail(Errc::invalid_argument, "non-finite sample at x=" + fmt(s.x));

    ConstructionLog log;
    const std::size_t n = samples.size();
    double scale = 0;
    for (const auto& s : samples) scale = std::max(scale, std::abs(s.s));
    std::vector<cplx> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = samples[i].s;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;

    std::vector<double> nodes;
    std::vector<cplx> a;
    std::size_t head = 0;
    while (head < idx.size()) {
        std::size_t p = idx[head++];
        nodes.push_back(samples[p].x);
        a.push_back(g[p]);
        bool done = head < idx.size();
        for (std::size_t q = head; q < idx.size() && done; ++q) {
            auto i = idx[q];
            done = std::abs(detail::cf_eval_prefix(nodes, a, samples[i].x) - samples[i].s) <= opt.terminate_tol * scale;
        }
        if (done) {
            log.terminated_early = true;
            log.messages.push_back("terminated after " + std::to_string(a.size()) + " coefficients; " +
                                   std::to_string(idx.size() - head) + " samples reproduced");
            break;
        }
        std::vector<std::size_t> next;
        for (std::size_t q = head; q < idx.size(); ++q) {
            auto i = idx[q];
            cplx d = g[i] - g[p];
            if (std::abs(d) <= opt.skip_tol * std::max(std::abs(g[i]), std::abs(g[p])) || !std::isfinite(std::abs(d))) {
                log.skipped_nodes.push_back(samples[i].x);
                log.messages.push_back("NumericallySingular: node x=" + fmt(samples[i].x) + " skipped at level " +
                                       std::to_string(a.size()));
                continue;
            }
            g[i] = (samples[i].x - samples[p].x) / d;
            next.push_back(i);
        }
        idx.assign(next.begin(), next.end());
        head = 0;
    }

    double amax = 0, amin = std::numeric_limits<double>::infinity();
    for (auto v : a) {
        double m = std::abs(v);
        if (m > 0) {
            amax = std::max(amax, m);
            amin = std::min(amin, m);
        }
    }
    log.condition_estimate = amax > 0 ? amax / amin : 1.0;
    return RationalApproximant(std::move(samples), std::move(nodes), std::move(a), axis, anchor, std::move(log));
}

inline RationalApproximant build_approximant(std::span<const Sample> samples, Axis axis, double anchor,
                                             const BuildOptions& opt = {})
{
    return build_approximant(std::vector<Sample>(samples.begin(), samples.end()), axis, anchor, opt);
}

struct SearchBox {
    double re_min, re_max, im_min, im_max;

    bool contains(cplx z) const
    {
        return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
    }
};

inline SearchBox default_cam_box(int jmax, double im_cap = 4.0) { return {0.0, jmax + 1.0, 0.0, im_cap}; }

enum class Significance { significant, background, spurious };

inline const char* significance_name(Significance s)
{
    switch (s) {
    case Significance::significant: return "significant";
    case Significance::background: return "background";
    case Significance::spurious: return "spurious";
    }
    return "?";
}

struct SignificanceConfig {
    double im_max = 3.0;
    double res_min = 1e-4;
};

struct PoleDatum {
    cplx position;
    cplx residue;
    double anchor = 0;
    Axis axis = Axis::j_at_fixed_e;
    Significance significance = Significance::background;
    bool ill_conditioned = false;
    double nearest_zero = std::numeric_limits<double>::infinity();
};

struct ZeroDatum {
    cplx position;
    double anchor = 0;
};

struct PoleSearchOptions {
    double doublet_radius = 1e-3;
    double dedup_radius = 1e-8;
    double contour_radius = 1e-3;
    int contour_points = 64;
    double residue_rel_tol = 1e-6;
    bool trust_region = true;
    double im_cap = 4.0;
    SignificanceConfig significance;
};

struct PoleZeroSet {
    std::vector<PoleDatum> poles;
    std::vector<ZeroDatum> zeros;
    std::vector<std::string> notes;

    std::vector<PoleDatum> non_spurious() const
    {
        std::vector<PoleDatum> out;
        for (const auto& p : poles)
            if (p.significance != Significance::spurious) out.push_back(p);
        return out;
    }
};

inline Significance classify_significance(const PoleDatum& pole, const SignificanceConfig& cfg = {})
{
    if (pole.position.imag() <= cfg.im_max && std::abs(pole.residue) >= cfg.res_min) return Significance::significant;
    return Significance::background;
}

namespace detail {

// Newton iteration on the numerator (zeros) or denominator (poles) of the fraction.
inline cplx polish(const RationalApproximant& r, cplx z0, bool on_denominator, int max_iter = 8)
{
    cplx z = z0;
    const double leash = 1e-2 * std::max(1.0, std::abs(z0));
    for (int it = 0; it < max_iter; ++it) {
        auto v = r.numden(z);
        cplx f = on_denominator ? v.b : v.a;
        cplx df = on_denominator ? v.db : v.da;
        if (df == cplx(0.0)) break;
        cplx step = f / df;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        z -= step;
        if (std::abs(z - z0) > leash) return z0;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

inline int denominator_winding(const RationalApproximant& r, cplx center, double radius, int points)
{
    double total = 0;
    cplx prev = r.numden(center + radius).b;
    for (int k = 1; k <= points; ++k) {
        double th = 2 * std::numbers::pi * k / points;
        cplx cur = r.numden(center + radius * std::polar(1.0, th)).b;
        total += std::arg(cur / prev);
        prev = cur;
    }
    return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

}  // namespace detail

// (1/2 pi i) times the contour integral of S on a circle around `center`, trapezoid rule.
inline cplx contour_residue(const RationalApproximant& r, cplx center, double radius = 1e-3, int points = 64)
{
    cplx acc = 0.0;
    for (int k = 0; k < points; ++k) {
        cplx w = std::polar(1.0, 2 * std::numbers::pi * k / points);
        acc += r.evaluate(center + radius * w) * w;
    }
    return acc * radius / static_cast<double>(points);
}

inline cplx residue_at(const RationalApproximant& r, cplx pole, double radius = 1e-3, int points = 64)
{
    if (detail::denominator_winding(r, pole, radius, points) >= 2)
        fail(Errc::multiple_root, "denominator has a repeated root near " + fmt(pole.real()) + (pole.imag() < 0 ? "" : "+") +
                                      fmt(pole.imag()) + "i");
    auto v = r.numden(pole);
    if (v.db == cplx(0.0) || !std::isfinite(std::abs(v.a / v.db)))
        fail(Errc::multiple_root, "denominator derivative vanishes at the pole");
    return v.a / v.db;
}

inline PoleZeroSet find_poles_zeros(const RationalApproximant& r, const SearchBox& box, const PoleSearchOptions& opt = {})
{
    if (!(box.re_max > box.re_min) || !(box.im_max > box.im_min))
        fail(Errc::invalid_argument, "search box must have positive area");
    PoleZeroSet out;
    if (r.cf_coeffs().size() <= 1) return out;

    const double c = 0.5 * (r.x_min() + r.x_max());
    const double h = std::max(0.5 * (r.x_max() - r.x_min()), 1e-300);
    auto [num, den] = r.polynomials(c, h);
    for (auto v : num)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            fail(Errc::ill_conditioned, "non-finite numerator coefficient in fraction-to-ratio conversion");
    for (auto v : den)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            fail(Errc::ill_conditioned, "non-finite denominator coefficient in fraction-to-ratio conversion");

    std::vector<cplx> zeros;
    for (auto t : polynomial_roots(num)) zeros.push_back(detail::polish(r, c + h * t, false));
    std::vector<cplx> poles;
    for (auto t : polynomial_roots(den)) {
        cplx z = detail::polish(r, c + h * t, true);
        bool dup = false;
        for (auto q : poles) dup = dup || std::abs(q - z) <= opt.dedup_radius;
        if (!dup) poles.push_back(z);
    }

    const bool cam = r.axis() == Axis::j_at_fixed_e;
    for (auto z : poles) {
        if (!box.contains(z)) continue;
        if (cam && opt.trust_region &&
            (z.imag() > opt.im_cap || z.real() < -1.0 || z.real() > r.x_max() + 1.5))
            continue;
        PoleDatum p;
        p.position = z;
        p.anchor = r.anchor();
        p.axis = r.axis();
        for (auto q : zeros) p.nearest_zero = std::min(p.nearest_zero, std::abs(q - z));
        if (p.nearest_zero <= opt.doublet_radius) {
            p.significance = Significance::spurious;
            auto v = r.numden(z);
            p.residue = v.db != cplx(0.0) ? v.a / v.db : cplx(0.0);
            out.poles.push_back(p);
            continue;
        }
        try {
            p.residue = residue_at(r, z, opt.contour_radius, opt.contour_points);
            cplx rc = contour_residue(r, z, opt.contour_radius, opt.contour_points);
            if (std::abs(rc - p.residue) > opt.residue_rel_tol * std::abs(p.residue)) {
                p.ill_conditioned = true;
                out.notes.push_back("IllConditioned: residue check mismatch at " + fmt(z.real()) + "," + fmt(z.imag()));
            }
        } catch (const Error& e) {
            p.ill_conditioned = true;
            p.residue = contour_residue(r, z, opt.contour_radius, opt.contour_points);
            out.notes.push_back(e.what());
        }
        p.significance = cam ? classify_significance(p, opt.significance) : Significance::significant;
        out.poles.push_back(p);
    }
    for (auto z : zeros)
        if (box.contains(z)) out.zeros.push_back({z, r.anchor()});

    auto by_re = [](const auto& l, const auto& rr) {
        return l.position.real() != rr.position.real() ? l.position.real() < rr.position.real()
                                                       : l.position.imag() < rr.position.imag();
    };
    std::sort(out.poles.begin(), out.poles.end(), by_re);
    std::sort(out.zeros.begin(), out.zeros.end(), by_re);
    return out;
}

}  // namespace regge
