#include <gtest/gtest.h>

#include <functional>
#include <sstream>
#include <string>

#include "regge/smatrix_io.hpp"
#include "regge/synth.hpp"

using namespace regge;

namespace {

const char* kSmall =
    "# transition: 0 0 0 -> 3 0 0\n"
    "# jmax: 1\n"
    "# E_meV, k, J, Re_S, Im_S\n"
    "62.09, 1.5, 0, 0.5, 0.1\n"
    "62.09, 1.5, 1, -0.2, 0.3\n"
    "70.0, 1.6, 0, 0.1, -0.4\n"
    "70.0, 1.6, 1, 0.0, 0.9\n";

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

std::string replace_line(std::string text, const std::string& from, const std::string& to)
{
    auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos);
    return text.replace(pos, from.size(), to);
}

PartialWaveTable read(const std::string& text, std::vector<std::string>* w = nullptr)
{
    std::istringstream in(text);
    return read_table_csv(in, {}, w);
}

}  // namespace

TEST(SmatrixIo, LoadsMinimalCsv)
{
    std::vector<std::string> warnings;
    auto t = read(kSmall, &warnings);
    EXPECT_EQ(t.n_energies(), 2u);
    EXPECT_EQ(t.jmax(), 1);
    EXPECT_EQ(t.values().size(), 4u);
    EXPECT_EQ(t.s(1, 1), cplx(0.0, 0.9));
    EXPECT_EQ(t.transition().str(), "0 0 0 -> 3 0 0");
    ASSERT_EQ(warnings.size(), 1u);  // jmax below 20
}

TEST(SmatrixIo, MissingRowReportsEnergyAndJ)
{
    auto text = replace_line(kSmall, "62.09, 1.5, 1, -0.2, 0.3\n", "");
    try {
        read(text);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::missing_j);
        EXPECT_NE(std::string(e.what()).find("62.09"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("J=1"), std::string::npos);
    }
}

TEST(SmatrixIo, UnitarityViolationNamesWorstEntry)
{
    auto text = replace_line(kSmall, "70.0, 1.6, 0, 0.1, -0.4", "70.0, 1.6, 0, 1.5, 0.0");
    try {
        read(text);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::unitarity_violation);
        EXPECT_NE(std::string(e.what()).find("E=70"), std::string::npos);
    }
    std::istringstream in(text);
    std::vector<std::string> w;
    TableOptions soft;
    soft.unitarity_is_error = false;
    EXPECT_NO_THROW(read_table_csv(in, soft, &w));
    EXPECT_FALSE(w.empty());
}

TEST(SmatrixIo, MalformedRowCarriesLineNumber)
{
    auto text = replace_line(kSmall, "70.0, 1.6, 1, 0.0, 0.9", "70.0, 1.6, 1, zero, 0.9");
    try {
        read(text);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::malformed_row);
        EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
    }
}

TEST(SmatrixIo, NonMonotonicEnergyAndHelicity)
{
    std::string swapped =
        "# transition: 0 0 0 -> 3 0 0\n# jmax: 0\n"
        "70.0, 1.6, 0, 0.1, 0.0\n62.09, 1.5, 0, 0.5, 0.1\n";
    EXPECT_EQ(code_of([&] { read(swapped); }), Errc::non_monotonic_energy);
    auto hel = replace_line(kSmall, "0 0 0 -> 3 0 0", "0 0 1 -> 3 0 1");
    EXPECT_EQ(code_of([&] { read(hel); }), Errc::nonzero_helicity);
}

TEST(SmatrixIo, SliceAtEnergy)
{
    std::vector<cplx> s(3, cplx(0.5, 0.0));
    PartialWaveTable t({}, {62.09}, {1.0}, 2, s, {}, nullptr);
    auto sl = slice_at_energy(t, 0);
    ASSERT_EQ(sl.size(), 3u);
    EXPECT_EQ(sl[0].x, 0.5);
    EXPECT_EQ(sl[1].x, 1.5);
    EXPECT_EQ(sl[2].x, 2.5);
    EXPECT_EQ(code_of([&] { slice_at_energy(t, -1); }), Errc::index_out_of_range);
    EXPECT_EQ(code_of([&] { slice_at_energy(t, 1); }), Errc::index_out_of_range);

    PartialWaveTable t30({}, {62.09}, {1.0}, 30, std::vector<cplx>(31, 0.1), {}, nullptr);
    EXPECT_EQ(slice_at_energy(t30, 0).size(), 31u);
}

TEST(SmatrixIo, SliceAtJ)
{
    PartialWaveTable t({}, {60.0, 61.0, 62.0}, {1.0, 1.0, 1.0}, 1, std::vector<cplx>(6, 0.5), {}, nullptr);
    auto sl = slice_at_J(t, 1);
    ASSERT_EQ(sl.size(), 3u);
    EXPECT_EQ(sl[0].x, 60.0);
    EXPECT_EQ(sl[2].x, 62.0);
    EXPECT_EQ(code_of([&] { slice_at_J(t, -1); }), Errc::index_out_of_range);
    EXPECT_EQ(code_of([&] { slice_at_J(t, 2); }), Errc::index_out_of_range);
}

TEST(SmatrixIo, SlicesAgree)
{
    auto g = synth::generate(synth::preset("two-pole-20"));
    const auto& t = g.table;
    for (long e = 0; e < static_cast<long>(t.n_energies()); ++e)
        for (long j = 0; j <= t.jmax(); ++j)
            EXPECT_EQ(slice_at_energy(t, e)[static_cast<std::size_t>(j)].s, slice_at_J(t, j)[static_cast<std::size_t>(e)].s);
}

TEST(SmatrixIo, CsvRoundTripIsBitExact)
{
    auto t = synth::add_noise(synth::generate(synth::preset("one-pole-20")).table, 1e-7, 3);
    std::ostringstream a;
    write_table_csv(a, t);
    std::istringstream in(a.str());
    auto back = read_table_csv(in, {}, nullptr);
    EXPECT_EQ(back.values(), t.values());
    EXPECT_EQ(back.energies(), t.energies());
    EXPECT_EQ(back.k(), t.k());
    std::ostringstream b;
    write_table_csv(b, back);
    EXPECT_EQ(a.str(), b.str());
}

TEST(SmatrixIo, JsonRoundTripIsBitExact)
{
    auto t = synth::generate(synth::preset("two-pole-20")).table;
    std::ostringstream a;
    write_table_json(a, t);
    std::istringstream in(a.str());
    auto back = read_table_json(in, {}, nullptr);
    EXPECT_EQ(back.values(), t.values());
    EXPECT_EQ(back.transition(), t.transition());
}

TEST(SmatrixIo, TransitionLabelParse)
{
    auto l = TransitionLabel::parse(" 0 0 0 -> 3 0 0 ");
    EXPECT_EQ(l.v_f, 3);
    EXPECT_EQ(code_of([] { TransitionLabel::parse("0 0 0 3 0 0"); }), Errc::malformed_header);
}
