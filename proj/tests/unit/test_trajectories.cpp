#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "regge/synth.hpp"
#include "regge/trajectories.hpp"

using namespace regge;

namespace {

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::io;
}

PoleDatum pole(cplx at)
{
    PoleDatum p;
    p.position = at;
    p.residue = {0.01, 0.0};
    p.significance = Significance::significant;
    return p;
}

ReggeTrajectory from(const std::vector<double>& energies, const std::function<cplx(double)>& lambda)
{
    ReggeTrajectory t;
    t.label = "T1";
    for (double e : energies) t.points.push_back({e, lambda(e), 0.0});
    return t;
}

std::vector<double> grid(double lo, double step, int n)
{
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo + step * i);
    return v;
}

}  // namespace

TEST(Trajectories, LinearDriftIsOneChain)
{
    std::vector<EnergyPoles> per;
    for (double e : grid(60.0, 1.25, 17)) per.push_back({e, {pole(cplx(10.0, 0.9) + 0.08 * e)}});
    auto t = chain_trajectories(per);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].points.size(), 17u);
    EXPECT_FALSE(t[0].is_short);
    EXPECT_EQ(t[0].label, "T1");
}

TEST(Trajectories, CrossingChainsStaySeparate)
{
    // Re lambda cross near E = 25; Im differs by 1.5
    std::vector<EnergyPoles> per;
    for (double e : grid(15.0, 1.0, 21))
        per.push_back({e, {pole(cplx(10.0 + 0.08 * e, 0.9)), pole(cplx(14.0 - 0.08 * e, 2.4))}});
    auto t = chain_trajectories(per, 0.5);
    ASSERT_EQ(t.size(), 2u);
    for (const auto& tr : t) {
        EXPECT_EQ(tr.points.size(), 21u);
        const double im = tr.points.front().lambda.imag();
        for (const auto& p : tr.points) EXPECT_EQ(p.lambda.imag(), im);
    }
}

TEST(Trajectories, EmptyAndOrphans)
{
    EXPECT_TRUE(chain_trajectories({}).empty());
    std::vector<EnergyPoles> per{{60.0, {pole({10.0, 1.0})}}, {61.0, {pole({15.0, 1.0})}}};
    auto t = chain_trajectories(per);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_TRUE(t[0].is_short);
    EXPECT_EQ(t[1].label, "T2");
    PoleDatum s = pole({11.0, 1.0});
    s.significance = Significance::spurious;
    EXPECT_TRUE(chain_trajectories({{60.0, {s}}}).empty());
}

TEST(Trajectories, ExactLinearFit)
{
    const cplx a(10.0, 0.9), b(0.08, 0.002);
    auto f = fit_linear(from(grid(62.0, 1.25, 17), [&](double e) { return a + b * e; }));
    EXPECT_LT(f.rms, 1e-10);
    EXPECT_LT(std::abs(f.alpha - a), 1e-10);
    EXPECT_LT(std::abs(f.beta - b), 1e-10);
    EXPECT_EQ(f.n, 17u);
}

TEST(Trajectories, QuadraticResidualNorm)
{
    // symmetric grid: the quadratic projects onto the constant only, leaving c (q - mean q)
    const double c = 1e-3;
    auto es = grid(60.0, 1.0, 11);
    const double mid = 65.0;
    auto f = fit_linear(from(es, [&](double e) { return cplx(10.0 + 0.08 * e + c * (e - mid) * (e - mid), 0.9); }));
    double mq = 0;
    for (double e : es) mq += (e - mid) * (e - mid);
    mq /= static_cast<double>(es.size());
    double var = 0;
    for (double e : es) var += std::pow((e - mid) * (e - mid) - mq, 2);
    var /= static_cast<double>(es.size());
    EXPECT_NEAR(f.rms, c * std::sqrt(var), 1e-12);
}

TEST(Trajectories, FitWindowAndErrors)
{
    auto t = from(grid(60.0, 1.0, 10), [](double e) { return cplx(e, 1.0); });
    auto f = fit_linear(t, {62.0, 65.0});
    EXPECT_EQ(f.n, 4u);
    EXPECT_EQ(code_of([&] { fit_linear(t, {62.0, 63.0}); }), Errc::too_few_points);
    ReggeTrajectory flat;
    flat.points = {{60.0, {1.0, 1.0}, 0.0}, {60.0, {2.0, 1.0}, 0.0}, {60.0, {3.0, 1.0}, 0.0}};
    EXPECT_EQ(code_of([&] { fit_linear(flat); }), Errc::degenerate_samples);
}

TEST(Trajectories, InvertExample)
{
    LinearFit f;
    f.alpha = {10.0, 0.9};
    f.beta = 0.08;
    auto ce = invert_to_ce(f, {12.0});
    ASSERT_EQ(ce.size(), 1u);
    EXPECT_LT(std::abs(ce[0].energy - cplx(25.0, -11.25)), 1e-12);
    EXPECT_EQ(ce[0].source, CeSource::inverted_from_cam);
    EXPECT_STREQ(ce_source_name(ce[0].source), "inverted_from_CAM");
    f.beta = 0.0;
    EXPECT_EQ(code_of([&] { invert_to_ce(f, {12.0}); }), Errc::beta_near_zero);
}

TEST(Trajectories, InvertUndoesFit)
{
    // real alpha, beta: lambda(E0) is a real J and inverting it returns E0
    auto es = grid(62.0, 1.25, 17);
    auto f = fit_linear(from(es, [](double e) { return cplx(-3.0 + 0.25 * e, 0.0); }));
    for (double e0 : {62.0, 70.3, 82.0}) {
        auto ce = invert_to_ce(f, {f.at(e0).real()});
        EXPECT_LT(std::abs(ce[0].energy - e0), 1e-10);
    }
    // complex fit: the complex E lands back on lambda = J + shift
    auto fc = fit_linear(from(es, [](double e) { return cplx(-3.0 + 0.25 * e, 0.4 + 0.01 * e); }));
    for (const auto& p : invert_to_ce(fc, {12.0, 13.0, 17.0}, 0.5))
        EXPECT_LT(std::abs(fc.alpha + fc.beta * p.energy - (p.J + 0.5)), 1e-10);
}

TEST(Trajectories, InvertedMatchesDirectCePoles)
{
    auto m = synth::preset("one-pole-40");
    auto g = synth::generate(m);
    std::vector<double> Js;
    for (int J = 12; J <= 17; ++J) Js.push_back(J);
    const auto& entries = g.ledger.entries;
    ReggeTrajectory t;
    for (const auto& e : entries) t.points.push_back({e.energy, e.poles[0].position, e.poles[0].residue});
    auto inv = invert_to_ce(fit_linear(t), Js, 0.5);
    for (std::size_t i = 0; i < Js.size(); ++i) {
        auto direct = ce_poles_direct(g.table, static_cast<long>(Js[i]));
        ASSERT_FALSE(direct.empty()) << Js[i];
        normalize_ce_signs(direct);
        const CEPole* best = &direct[0];
        for (const auto& d : direct)
            if (std::abs(d.energy - inv[i].energy) < std::abs(best->energy - inv[i].energy)) best = &d;
        EXPECT_LT(std::abs(best->energy.real() - inv[i].energy.real()), 0.02 * std::abs(inv[i].energy.real())) << Js[i];
        EXPECT_EQ(best->source, CeSource::direct_pade_in_e);
    }
}

TEST(Trajectories, NormalizeSigns)
{
    std::vector<CEPole> v{{12, {60.0, -1.0}, {}, {}}, {13, {61.0, -1.2}, {}, {}}, {14, {62.0, 0.5}, {}, {}}};
    EXPECT_TRUE(normalize_ce_signs(v));
    EXPECT_EQ(v[0].energy, cplx(60.0, 1.0));
    EXPECT_EQ(v[2].energy, cplx(62.0, -0.5));
    EXPECT_FALSE(normalize_ce_signs(v));
}

TEST(Trajectories, AngularLife)
{
    EXPECT_NEAR(angular_life_deg({12.49, 0.95}), 30.16, 0.005);
    // constant Im lambda: the same angular life at every energy
    for (double e : {62.0, 70.0, 80.0}) {
        auto o = observables(cplx(10.0 + 0.08 * e, 0.95), cplx(e, 1.0));
        EXPECT_DOUBLE_EQ(o.angular_life_deg, angular_life_deg({12.49, 0.95}));
    }
    EXPECT_EQ(code_of([] { angular_life_deg({12.0, 0.0}); }), Errc::non_positive_imaginary_part);
}

TEST(Trajectories, Lifetime)
{
    const cplx e(70.0, 1.6455);
    EXPECT_DOUBLE_EQ(lifetime_s(e) * 2 * e.imag(), hbar_mev_s);
    // meV widths give picosecond-scale lifetimes
    EXPECT_NEAR(lifetime_s(e), 2.0e-13, 0.001e-13);
    EXPECT_EQ(code_of([] { lifetime_s({70.0, 0.0}); }), Errc::non_positive_imaginary_part);
    EXPECT_EQ(code_of([] { lifetime_s({70.0, -1.0}); }), Errc::non_positive_imaginary_part);
}

TEST(Trajectories, RotationalConstantRounding)
{
    EXPECT_EQ(j_from_lambda({12.49, 0.9}), 12);
    EXPECT_EQ(j_from_lambda({12.0, 0.9}), 12);  // 11.5 rounds away from zero
    EXPECT_EQ(j_from_lambda({13.01, 0.9}), 13);
    auto o = observables(cplx(12.49, 0.95), cplx(62.09, 1.0));
    EXPECT_DOUBLE_EQ(o.rotational_constant, 62.09 / 156.0);
    EXPECT_FALSE(o.angular_velocity.has_value());
    EXPECT_TRUE(std::isnan(rotational_constant(5.0, 0.0)));
    auto w = observables(cplx(12.49, 0.95), cplx(62.09, 1.0), 2.0);
    ASSERT_TRUE(w.angular_velocity.has_value());
    EXPECT_DOUBLE_EQ(*w.angular_velocity, 12.49 / 2.0);
}

TEST(Trajectories, CompareWithOffset)
{
    std::vector<CEPole> a, b;
    for (int J = 12; J <= 17; ++J) {
        cplx e(40.0 + 3.0 * J, 1.0 + 0.1 * J);
        a.push_back({static_cast<double>(J), e, CeSource::inverted_from_cam, "T1"});
        b.push_back({static_cast<double>(J), e + 13.0, CeSource::direct_pade_in_e, {}});
    }
    auto c = compare_ce_sets(a, b, 13.0);
    ASSERT_EQ(c.pairs.size(), 6u);
    for (const auto& p : c.pairs) {
        EXPECT_NEAR(p.d_re, 0.0, 1e-12);
        EXPECT_NEAR(p.d_im, 0.0, 1e-12);
    }
    auto c0 = compare_ce_sets(a, b, 0.0);
    EXPECT_NEAR(c0.best_offset, 13.0, 1e-12);
    EXPECT_TRUE(c0.warnings.empty());

    std::vector<CEPole> far{{30.0, {90.0, 1.0}, CeSource::direct_pade_in_e, {}}};
    auto none = compare_ce_sets(a, far, 0.0);
    EXPECT_TRUE(none.pairs.empty());
    EXPECT_EQ(none.warnings.size(), 1u);
}
