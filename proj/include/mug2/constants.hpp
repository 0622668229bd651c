#ifndef MUG2_CONSTANTS_HPP
#define MUG2_CONSTANTS_HPP

// Physical constants, unit conversions and experiment reference values.
//
// Everything is kept in natural units (GeV, hbar = c = 1). Conversions to
// tesla and seconds go through hbar_over_GeV_s and c_m_per_s only.
//
// File format: flat UTF-8 "key = value" lines, '#' starts a comment. A
// trailing comment on an entry line is taken as that entry's provenance.

#include "mug2/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

namespace mug2 {

struct ConstantsTable {
    double m_mu;            // GeV
    double m_e;             // GeV
    double G_F;             // GeV^-2
    double hbar_over_GeV_s; // hbar in GeV s
    double c_m_per_s;
    double tau_mu;          // s, proper lifetime
    double E_max;           // GeV, positron lab endpoint used for GeV <-> y
    double gamma_magic;
    double B_tesla;
    double a_mu_ref;        // ppm denominator
    double a_mu_exp;
    double a_mu_exp_err;
    double a_mu_sm_datadriven;
    double a_mu_sm_datadriven_err;
    double a_mu_sm_lattice;
    double a_mu_sm_lattice_err;

    std::map<std::string, std::string> provenance;

    static ConstantsTable defaults();

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;
};

namespace detail {

struct ConstantEntry {
    std::string_view key;
    double ConstantsTable::*member;
    double value;
    std::string_view provenance;
};

inline constexpr std::string_view kPdg = "PDG 2024, Phys. Rev. D110, 030001";

inline const std::array<ConstantEntry, 16>& constant_entries() {
    static const std::array<ConstantEntry, 16> entries{{
        {"B_tesla", &ConstantsTable::B_tesla, 1.45, "BNL/FNAL storage ring field, Phys. Rev. D73, 072003"},
        {"E_max", &ConstantsTable::E_max, 3.1, "positron endpoint of the observed range, Phys. Rev. D103, 072002"},
        {"G_F", &ConstantsTable::G_F, 1.1663788e-5, kPdg},
        {"a_mu_exp", &ConstantsTable::a_mu_exp, 116592059e-11, "world average, Phys. Rev. Lett. 131, 161802"},
        {"a_mu_exp_err", &ConstantsTable::a_mu_exp_err, 22e-11, "world average, Phys. Rev. Lett. 131, 161802"},
        {"a_mu_ref", &ConstantsTable::a_mu_ref, 116592059e-11, "experimental world average used as ppm denominator"},
        {"a_mu_sm_datadriven", &ConstantsTable::a_mu_sm_datadriven, 116591810e-11, "data-driven SM, Phys. Rep. 887, 1"},
        {"a_mu_sm_datadriven_err", &ConstantsTable::a_mu_sm_datadriven_err, 43e-11, "data-driven SM, Phys. Rep. 887, 1"},
        {"a_mu_sm_lattice", &ConstantsTable::a_mu_sm_lattice, 116591954e-11, "lattice HVP SM, Nature 593, 51"},
        {"a_mu_sm_lattice_err", &ConstantsTable::a_mu_sm_lattice_err, 55e-11, "lattice HVP SM, Nature 593, 51"},
        {"c_m_per_s", &ConstantsTable::c_m_per_s, 299792458.0, "SI exact"},
        {"gamma_magic", &ConstantsTable::gamma_magic, 29.3, "magic momentum, Phys. Rev. D73, 072003"},
        {"hbar_over_GeV_s", &ConstantsTable::hbar_over_GeV_s, 6.582119569e-25, kPdg},
        {"m_e", &ConstantsTable::m_e, 0.51099895000e-3, kPdg},
        {"m_mu", &ConstantsTable::m_mu, 0.1056583755, kPdg},
        {"tau_mu", &ConstantsTable::tau_mu, 2.1969811e-6, kPdg},
    }};
    return entries;
}

inline const ConstantEntry* find_entry(std::string_view key) {
    for (const auto& e : constant_entries())
        if (e.key == key) return &e;
    return nullptr;
}

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_roundtrip(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

} // namespace detail

inline ConstantsTable ConstantsTable::defaults() {
    ConstantsTable t{};
    for (const auto& e : detail::constant_entries()) {
        t.*(e.member) = e.value;
        t.provenance[std::string(e.key)] = std::string(e.provenance);
    }
    return t;
}

inline void ConstantsTable::validate() const {
    const std::pair<const char*, double> positive[] = {
        {"m_mu", m_mu}, {"m_e", m_e}, {"G_F", G_F}, {"hbar_over_GeV_s", hbar_over_GeV_s},
        {"c_m_per_s", c_m_per_s}, {"tau_mu", tau_mu}, {"E_max", E_max}};
    for (const auto& [name, v] : positive)
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
    if (!(gamma_magic >= 1.0)) throw ConfigError("gamma_magic must be >= 1");
    if (!(B_tesla >= 0.0)) throw ConfigError("B_tesla must be non-negative");
    if (!(a_mu_ref >= 1.0e-3 && a_mu_ref <= 1.3e-3))
        throw ConfigError("a_mu_ref must lie in [1.0e-3, 1.3e-3]");
    for (const auto& e : detail::constant_entries()) {
        auto it = provenance.find(std::string(e.key));
        if (it == provenance.end() || it->second.empty())
            throw ConfigError(std::string(e.key) + " has no provenance");
    }
}

/// Parses the key = value format on top of the defaults. `source` names the
/// stream in diagnostics and becomes the provenance of entries without one.
inline ConstantsTable parse_constants(std::istream& in, const std::string& source) {
    ConstantsTable t = ConstantsTable::defaults();
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        std::string_view comment;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            comment = detail::trim(line.substr(hash + 1));
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        const auto where = source + ":" + std::to_string(line_no);
        if (eq == std::string_view::npos)
            throw ParseError(where + ": expected 'key = value'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto text = detail::trim(line.substr(eq + 1));
        const auto* entry = detail::find_entry(key);
        if (entry == nullptr) throw ParseError(where + ": unknown key '" + std::string(key) + "'");

        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
            throw ParseError(where + ": malformed value for key '" + std::string(key) + "'");

        t.*(entry->member) = value;
        t.provenance[std::string(key)] = comment.empty() ? where : std::string(comment);
    }
    t.validate();
    return t;
}

/// No path -> defaults. Missing file -> NotFoundError.
inline ConstantsTable load_constants(const std::optional<std::string>& path = std::nullopt) {
    if (!path) {
        auto t = ConstantsTable::defaults();
        t.validate();
        return t;
    }
    std::ifstream in(*path);
    if (!in) throw NotFoundError("constants file not found: " + *path);
    return parse_constants(in, *path);
}

/// Canonical dump, sorted by key; loading it back reproduces the table exactly.
inline std::string dump_constants(const ConstantsTable& t) {
    std::ostringstream os;
    for (const auto& e : detail::constant_entries()) {
        os << e.key << " = " << detail::format_roundtrip(t.*(e.member));
        auto it = t.provenance.find(std::string(e.key));
        if (it != t.provenance.end() && !it->second.empty()) os << "  # " << it->second;
        os << '\n';
    }
    return os.str();
}

/// 3 m_mu^2 G_F / (4 sqrt2 pi^2): the dimensionless factor multiplying f in delta a_mu.
inline double coefficient_C(const ConstantsTable& t) {
    return 3.0 * t.m_mu * t.m_mu * t.G_F / (4.0 * std::numbers::sqrt2 * std::numbers::pi * std::numbers::pi);
}

/// The value printed alongside the computed coefficient for comparison.
inline constexpr double kQuotedCoefficient = 7.2e-9;

/// e*B for a unit charge, in GeV^2.
inline double field_to_natural(double B_tesla, const ConstantsTable& t) {
    // e c (1 T) = 1e-9 c GeV/m, times hbar c in GeV m.
    return B_tesla * 1e-9 * t.c_m_per_s * (t.hbar_over_GeV_s * t.c_m_per_s);
}

/// Rate in natural units (GeV) to angular frequency in rad/s.
inline double natural_to_per_second(double rate_GeV, const ConstantsTable& t) {
    return rate_GeV / t.hbar_over_GeV_s;
}

/// Dilated lifetime gamma * tau at the magic momentum, seconds.
inline double tau_lab(const ConstantsTable& t) { return t.gamma_magic * t.tau_mu; }

/// Largest lab energy of a massless positron from a muon with Lorentz factor gamma.
inline double positron_endpoint(double gamma, double m_mu) {
    const double v = std::sqrt(1.0 - 1.0 / (gamma * gamma));
    return 0.5 * gamma * m_mu * (1.0 + v);
}

} // namespace mug2

#endif
