#include "mug2/constants.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace mug2;

namespace {

ConstantsTable parse(const std::string& text) {
    std::istringstream in(text);
    return parse_constants(in, "test.conf");
}

} // namespace

TEST(Constants, DefaultsCarryPdgMuonMass) {
    const auto t = load_constants();
    EXPECT_EQ(t.m_mu, 0.1056583755);
    EXPECT_EQ(t.E_max, 3.1);
    EXPECT_EQ(t.gamma_magic, 29.3);
    EXPECT_NE(t.provenance.at("m_mu").find("PDG"), std::string::npos);
}

TEST(Constants, EveryEntryHasProvenance) {
    const auto t = load_constants();
    for (const auto& e : detail::constant_entries()) EXPECT_FALSE(t.provenance.at(std::string(e.key)).empty());
}

TEST(Constants, FileOverridesDefault) {
    const auto t = parse("# comment line\nE_max = 3.09\n");
    EXPECT_EQ(t.E_max, 3.09);
    EXPECT_EQ(t.m_mu, 0.1056583755);
    EXPECT_EQ(t.provenance.at("E_max"), "test.conf:2");
}

TEST(Constants, TrailingCommentBecomesProvenance) {
    const auto t = parse("B_tesla = 1.4513  # field map average\n");
    EXPECT_EQ(t.B_tesla, 1.4513);
    EXPECT_EQ(t.provenance.at("B_tesla"), "field map average");
}

TEST(Constants, NegativeMassRejected) {
    try {
        parse("m_mu = -1\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("m_mu must be positive"), std::string::npos);
    }
}

TEST(Constants, UnknownKeyRejected) { EXPECT_THROW(parse("m_tau = 1.7\n"), ParseError); }

TEST(Constants, MalformedValueNamesKeyAndLine) {
    try {
        parse("\n\nG_F = 1.16x\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("G_F"), std::string::npos);
        EXPECT_NE(msg.find(":3"), std::string::npos);
    }
}

TEST(Constants, MissingFileIsNotFound) {
    EXPECT_THROW(load_constants(std::string("/nonexistent/mug2.conf")), NotFoundError);
}

TEST(Constants, AnomalyReferenceSanityBand) {
    EXPECT_THROW(parse("a_mu_ref = 2e-3\n"), ConfigError);
    EXPECT_NO_THROW(parse("a_mu_ref = 1.2e-3\n"));
}

TEST(Constants, DumpReloadIsBitExact) {
    auto t = parse("m_mu = 0.10565837551234567  # tweaked\ntau_mu = 2.1969811e-6\n");
    const std::string dump = dump_constants(t);
    const auto back = parse(dump);
    EXPECT_EQ(dump_constants(back), dump);
    for (const auto& e : detail::constant_entries()) EXPECT_EQ(back.*(e.member), t.*(e.member)) << e.key;
    EXPECT_EQ(back.provenance, t.provenance);
}

TEST(Constants, DumpIsSortedByKey) {
    std::istringstream in(dump_constants(load_constants()));
    std::string line, prev;
    while (std::getline(in, line)) {
        const auto key = line.substr(0, line.find(' '));
        EXPECT_LT(prev, key);
        prev = key;
    }
}

TEST(Constants, ShippedConfigMatchesDefaults) {
    const auto t = load_constants(std::string(MUG2_SOURCE_DIR "/config/default_constants.conf"));
    EXPECT_EQ(dump_constants(t), dump_constants(load_constants()));
}

TEST(Coefficient, DirectEvaluation) {
    const double C = coefficient_C(load_constants());
    // 3 (0.1056583755)^2 1.1663788e-5 / (4 sqrt2 pi^2)
    EXPECT_NEAR(C, 6.9967e-9, 1e-12);
    EXPECT_NEAR(C, 7.0e-9, 0.02 * 7.0e-9);
    // The rounded 7.2e-9 sits within 5% of the evaluated coefficient.
    EXPECT_LT(std::abs(C - kQuotedCoefficient) / kQuotedCoefficient, 0.05);
}

TEST(Coefficient, Homogeneity) {
    auto t = load_constants();
    const double C = coefficient_C(t);
    for (double lambda : {0.5, 2.0, 3.7, 1e3}) {
        auto s = t;
        s.m_mu = lambda * t.m_mu;
        EXPECT_NEAR(coefficient_C(s), lambda * lambda * C, 1e-15 * lambda * lambda * C);
        s = t;
        s.G_F = lambda * t.G_F;
        EXPECT_NEAR(coefficient_C(s), lambda * C, 1e-15 * lambda * C);
    }
    auto s = t;
    s.G_F = 2.0 * t.G_F;
    EXPECT_EQ(coefficient_C(s), 2.0 * C);
    s = t;
    s.m_mu = 2.0 * t.m_mu;
    EXPECT_EQ(coefficient_C(s), 4.0 * C);
}

TEST(Units, FieldConversion) {
    const auto t = load_constants();
    // e * 1 T * c * hbar c = 0.299792458 GeV/m * 1.973269804e-16 GeV m
    EXPECT_NEAR(field_to_natural(1.0, t), 5.9157e-17, 1e-20);
    EXPECT_NEAR(tau_lab(t), 64.37e-6, 0.01e-6);
    EXPECT_NEAR(positron_endpoint(t.gamma_magic, t.m_mu), 3.0949, 1e-3);
}
