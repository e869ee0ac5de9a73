#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "format.hpp"

namespace regge {

struct TransitionLabel {
    int v_i = 0, j_i = 0, omega_i = 0;
    int v_f = 0, j_f = 0, omega_f = 0;

    std::string str() const
    {
        std::ostringstream os;
        os << v_i << ' ' << j_i << ' ' << omega_i << " -> " << v_f << ' ' << j_f << ' ' << omega_f;
        return os.str();
    }

    static TransitionLabel parse(std::string_view text)
    {
        auto arrow = text.find("->");
        if (arrow == std::string_view::npos)
            fail(Errc::malformed_header, "transition label needs '->': '" + std::string(text) + "'");
        auto triple = [&](std::string_view part, int* out) {
            std::istringstream is{std::string(part)};
            for (int i = 0; i < 3; ++i) {
                long v;
                if (!(is >> v) || v < 0)
                    fail(Errc::malformed_header, "bad quantum numbers in '" + std::string(text) + "'");
                out[i] = static_cast<int>(v);
            }
            std::string rest;
            if (is >> rest) fail(Errc::malformed_header, "trailing text in transition '" + std::string(text) + "'");
        };
        int a[3], b[3];
        triple(text.substr(0, arrow), a);
        triple(text.substr(arrow + 2), b);
        return {a[0], a[1], a[2], b[0], b[1], b[2]};
    }

    friend bool operator==(const TransitionLabel&, const TransitionLabel&) = default;
};

struct TableOptions {
    double unitarity_tol = 1e-6;
    bool unitarity_is_error = true;
    int jmax_warn = 20;
};

struct Sample {
    double x;
    cplx s;
};

class PartialWaveTable {
public:
    PartialWaveTable() = default;

    // Throws on any invariant violation; non-fatal findings go to `warnings`.
    PartialWaveTable(TransitionLabel transition, std::vector<double> energies, std::vector<double> k, int jmax,
                     std::vector<cplx> s, const TableOptions& opt = {}, std::vector<std::string>* warnings = nullptr)
        : transition_(transition), energies_(std::move(energies)), k_(std::move(k)), jmax_(jmax), s_(std::move(s))
    {
        validate(opt, warnings);
    }

    const TransitionLabel& transition() const { return transition_; }
    const std::vector<double>& energies() const { return energies_; }
    const std::vector<double>& k() const { return k_; }
    int jmax() const { return jmax_; }
    std::size_t n_energies() const { return energies_.size(); }
    std::size_t n_j() const { return static_cast<std::size_t>(jmax_) + 1; }

    cplx s(std::size_t e, int j) const { return s_[e * n_j() + static_cast<std::size_t>(j)]; }
    std::span<const cplx> row(std::size_t e) const { return {s_.data() + e * n_j(), n_j()}; }
    const std::vector<cplx>& values() const { return s_; }

private:
    void validate(const TableOptions& opt, std::vector<std::string>* warnings)
    {
        if (transition_.omega_i != 0 || transition_.omega_f != 0)
            fail(Errc::nonzero_helicity, "transition " + transition_.str() + " has nonzero helicity; only Omega=0 is supported");
        if (jmax_ < 0) fail(Errc::malformed_header, "jmax must be non-negative");
        if (energies_.empty()) fail(Errc::malformed_row, "table has no energies");
        if (k_.size() != energies_.size()) fail(Errc::malformed_row, "k list length differs from energy list");
        if (s_.size() != energies_.size() * n_j()) fail(Errc::missing_j, "S matrix size does not match energies x (jmax+1)");
        for (std::size_t e = 0; e < energies_.size(); ++e) {
            if (!std::isfinite(energies_[e])) fail(Errc::malformed_row, "non-finite energy");
            if (e > 0 && !(energies_[e] > energies_[e - 1]))
                fail(Errc::non_monotonic_energy, "energy " + fmt(energies_[e]) + " does not exceed " + fmt(energies_[e - 1]));
            if (!(k_[e] > 0) || !std::isfinite(k_[e]))
                fail(Errc::malformed_row, "k must be positive at E=" + fmt(energies_[e]));
        }
        double worst = -1;
        std::size_t we = 0;
        int wj = 0;
        for (std::size_t e = 0; e < energies_.size(); ++e)
            for (int j = 0; j <= jmax_; ++j) {
                cplx v = s(e, j);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    fail(Errc::malformed_row, "non-finite S at E=" + fmt(energies_[e]) + " J=" + fmt(j));
                if (std::abs(v) > worst) {
                    worst = std::abs(v);
                    we = e;
                    wj = j;
                }
            }
        if (worst > 1.0 + opt.unitarity_tol) {
            std::string msg = "|S|=" + fmt(worst) + " at E=" + fmt(energies_[we]) + " J=" + fmt(wj) + " exceeds 1+" +
                              fmt(opt.unitarity_tol);
            if (opt.unitarity_is_error) fail(Errc::unitarity_violation, msg);
            if (warnings) warnings->push_back("UnitarityViolation: " + msg);
        }
        if (jmax_ < opt.jmax_warn && warnings)
            warnings->push_back("jmax=" + fmt(jmax_) + " is below the recommended minimum of " + fmt(opt.jmax_warn));
    }

    TransitionLabel transition_;
    std::vector<double> energies_;
    std::vector<double> k_;
    int jmax_ = 0;
    std::vector<cplx> s_;
};

enum class TableFormat { csv, json };

inline TableFormat format_from_path(const std::filesystem::path& p)
{
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".json") return TableFormat::json;
    return TableFormat::csv;
}

inline PartialWaveTable read_table_csv(std::istream& in, const TableOptions& opt = {},
                                       std::vector<std::string>* warnings = nullptr)
{
    std::optional<TransitionLabel> transition;
    std::optional<int> jmax;
    std::vector<double> energies, ks;
    std::vector<std::map<int, cplx>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            auto body = trim(t.substr(1));
            auto colon = body.find(':');
            if (colon == std::string_view::npos) continue;
            auto key = trim(body.substr(0, colon));
            auto val = trim(body.substr(colon + 1));
            if (key == "transition") {
                transition = TransitionLabel::parse(val);
            } else if (key == "jmax") {
                auto v = parse_long(val);
                if (!v) fail(Errc::malformed_header, "line " + std::to_string(lineno) + ": bad jmax");
                jmax = static_cast<int>(*v);
            }
            continue;
        }
        if (t.rfind("E_meV", 0) == 0) continue;  // optional column header
        std::vector<std::string_view> fields;
        std::size_t pos = 0;
        while (true) {
            auto c = t.find(',', pos);
            fields.push_back(trim(t.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos)));
            if (c == std::string_view::npos) break;
            pos = c + 1;
        }
        auto bad = [&](const std::string& why) {
            fail(Errc::malformed_row, "line " + std::to_string(lineno) + ": " + why);
        };
        if (fields.size() != 5) bad("expected 5 fields, found " + std::to_string(fields.size()));
        auto e = parse_double(fields[0]);
        auto k = parse_double(fields[1]);
        auto j = parse_long(fields[2]);
        auto re = parse_double(fields[3]);
        auto im = parse_double(fields[4]);
        if (!e || !k || !j || !re || !im) bad("unparseable number");
        if (*j < 0) bad("negative J");
        if (energies.empty() || *e != energies.back()) {
            if (!energies.empty() && *e < energies.back())
                fail(Errc::non_monotonic_energy, "line " + std::to_string(lineno) + ": energy " + fmt(*e) +
                                                     " follows " + fmt(energies.back()));
            energies.push_back(*e);
            ks.push_back(*k);
            rows.emplace_back();
        } else if (*k != ks.back()) {
            bad("k differs within energy block");
        }
        if (!rows.back().emplace(static_cast<int>(*j), cplx(*re, *im)).second) bad("duplicate J");
    }
    if (!transition) fail(Errc::malformed_header, "missing '# transition:' header");
    if (!jmax) fail(Errc::malformed_header, "missing '# jmax:' header");
    std::vector<cplx> s;
    s.reserve(energies.size() * static_cast<std::size_t>(*jmax + 1));
    for (std::size_t ie = 0; ie < energies.size(); ++ie) {
        for (int j = 0; j <= *jmax; ++j) {
            auto it = rows[ie].find(j);
            if (it == rows[ie].end())
                fail(Errc::missing_j, "no row for E=" + fmt(energies[ie]) + " J=" + fmt(j));
            s.push_back(it->second);
        }
        if (rows[ie].size() > static_cast<std::size_t>(*jmax + 1))
            fail(Errc::malformed_row, "J above jmax at E=" + fmt(energies[ie]));
    }
    return PartialWaveTable(*transition, std::move(energies), std::move(ks), *jmax, std::move(s), opt, warnings);
}

inline PartialWaveTable read_table_json(std::istream& in, const TableOptions& opt = {},
                                        std::vector<std::string>* warnings = nullptr)
{
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        fail(Errc::malformed_row, std::string("JSON parse error: ") + ex.what());
    }
    try {
        auto transition = TransitionLabel::parse(j.at("transition").get<std::string>());
        int jmax = j.at("jmax").get<int>();
        auto energies = j.at("energies").get<std::vector<double>>();
        auto k = j.at("k").get<std::vector<double>>();
        auto re = j.at("s_re").get<std::vector<std::vector<double>>>();
        auto im = j.at("s_im").get<std::vector<std::vector<double>>>();
        if (re.size() != energies.size() || im.size() != energies.size())
            fail(Errc::malformed_row, "s_re/s_im must have one row per energy");
        std::vector<cplx> s;
        for (std::size_t e = 0; e < energies.size(); ++e) {
            for (int J = 0; J <= jmax; ++J) {
                auto uj = static_cast<std::size_t>(J);
                if (uj >= re[e].size() || uj >= im[e].size())
                    fail(Errc::missing_j, "no entry for E=" + fmt(energies[e]) + " J=" + fmt(J));
                s.emplace_back(re[e][uj], im[e][uj]);
            }
            if (re[e].size() != static_cast<std::size_t>(jmax + 1) || im[e].size() != re[e].size())
                fail(Errc::malformed_row, "row length mismatch at E=" + fmt(energies[e]));
        }
        return PartialWaveTable(transition, std::move(energies), std::move(k), jmax, std::move(s), opt, warnings);
    } catch (const nlohmann::json::exception& ex) {
        fail(Errc::malformed_header, std::string("JSON table field error: ") + ex.what());
    }
}

inline void write_table_csv(std::ostream& out, const PartialWaveTable& t)
{
    out << "# transition: " << t.transition().str() << '\n';
    out << "# jmax: " << t.jmax() << '\n';
    out << "# E_meV, k, J, Re_S, Im_S\n";
    for (std::size_t e = 0; e < t.n_energies(); ++e)
        for (int j = 0; j <= t.jmax(); ++j) {
            auto v = t.s(e, j);
            out << fmt(t.energies()[e]) << ',' << fmt(t.k()[e]) << ',' << j << ',' << fmt(v.real()) << ','
                << fmt(v.imag()) << '\n';
        }
}

inline nlohmann::ordered_json table_to_json(const PartialWaveTable& t)
{
    nlohmann::ordered_json j;
    j["transition"] = t.transition().str();
    j["jmax"] = t.jmax();
    j["energies"] = t.energies();
    j["k"] = t.k();
    auto re = nlohmann::ordered_json::array();
    auto im = nlohmann::ordered_json::array();
    for (std::size_t e = 0; e < t.n_energies(); ++e) {
        auto r = nlohmann::ordered_json::array();
        auto i = nlohmann::ordered_json::array();
        for (auto v : t.row(e)) {
            r.push_back(v.real());
            i.push_back(v.imag());
        }
        re.push_back(std::move(r));
        im.push_back(std::move(i));
    }
    j["s_re"] = std::move(re);
    j["s_im"] = std::move(im);
    return j;
}

inline void write_table_json(std::ostream& out, const PartialWaveTable& t) { out << table_to_json(t).dump(1) << '\n'; }

inline PartialWaveTable load_table(const std::filesystem::path& path, TableFormat format, const TableOptions& opt = {},
                                   std::vector<std::string>* warnings = nullptr)
{
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open " + path.string());
    return format == TableFormat::json ? read_table_json(in, opt, warnings) : read_table_csv(in, opt, warnings);
}

inline PartialWaveTable load_table(const std::filesystem::path& path, const TableOptions& opt = {},
                                   std::vector<std::string>* warnings = nullptr)
{
    return load_table(path, format_from_path(path), opt, warnings);
}

inline void save_table(const std::filesystem::path& path, const PartialWaveTable& t, TableFormat format)
{
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write " + path.string());
    if (format == TableFormat::json)
        write_table_json(out, t);
    else
        write_table_csv(out, t);
}

// (lambda = J + 1/2, S) pairs at one energy.
inline std::vector<Sample> slice_at_energy(const PartialWaveTable& t, long e_index)
{
    if (e_index < 0 || static_cast<std::size_t>(e_index) >= t.n_energies())
        fail(Errc::index_out_of_range, "energy index " + std::to_string(e_index) + " outside [0, " +
                                           std::to_string(t.n_energies()) + ")");
    std::vector<Sample> out;
    out.reserve(t.n_j());
    for (int j = 0; j <= t.jmax(); ++j) out.push_back({j + 0.5, t.s(static_cast<std::size_t>(e_index), j)});
    return out;
}

inline std::vector<Sample> slice_at_J(const PartialWaveTable& t, long J)
{
    if (J < 0 || J > t.jmax())
        fail(Errc::index_out_of_range, "J=" + std::to_string(J) + " outside [0, " + std::to_string(t.jmax()) + "]");
    std::vector<Sample> out;
    out.reserve(t.n_energies());
    for (std::size_t e = 0; e < t.n_energies(); ++e) out.push_back({t.energies()[e], t.s(e, static_cast<int>(J))});
    return out;
}

}  // namespace regge
