#include "mug2/decaygen.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mug2;

namespace {

std::vector<double> poly_f_moment(const std::vector<double>& w) {
    // (1 - y) w(y)
    return oracle::poly_mul({1.0, -1.0}, w);
}

double oracle_mean_f(const std::vector<double>& w, double a, double b) {
    return oracle::poly_integral(poly_f_moment(w), a, b) / oracle::poly_integral(w, a, b);
}

} // namespace

TEST(Michel, RestFrameIsotropicWithoutPolarization) {
    Stream rng(11, 0);
    std::vector<double> c;
    for (int i = 0; i < 200000; ++i) c.push_back(sample_rest(0.0, rng).cos_theta);
    const double d = oracle::ks_distance(c, [](double x) { return 0.5 * (x + 1.0); });
    EXPECT_LT(d, 1.63 / std::sqrt(double(c.size()))); // 1% critical value
}

TEST(Michel, RestFrameEnergyMomentsAndShape) {
    Stream rng(12, 0);
    const int n = 400000;
    double sum = 0.0;
    std::vector<int> hist(20, 0);
    for (int i = 0; i < n; ++i) {
        const auto d = sample_rest(1.0, rng);
        sum += d.x;
        ++hist[std::min(19, int(d.x * 20))];
    }
    // <x> under x^2 (3 - 2x) is 0.7
    EXPECT_NEAR(sum / n, 0.7, 5.0 * 0.2 / std::sqrt(double(n)));
    EXPECT_EQ(std::max_element(hist.begin(), hist.end()) - hist.begin(), 19);
}

TEST(Michel, PolarizationOutOfRange) {
    Stream rng(1, 0);
    EXPECT_THROW(sample_rest(1.5, rng), DomainError);
}

TEST(LabSpectrum, EndpointsAndNormalization) {
    EXPECT_EQ(analytic_N(1.0), 0.0);
    EXPECT_EQ(analytic_N(0.0), 5.0);
    EXPECT_DOUBLE_EQ(analytic_A(1.0), 1.0);
    EXPECT_DOUBLE_EQ(analytic_A(0.0), -0.2);
    EXPECT_DOUBLE_EQ(N_integral(0.0, 1.0), 3.0);
    EXPECT_DOUBLE_EQ(NA_integral(0.0, 1.0), 0.0);
    EXPECT_THROW(analytic_N(1.1), DomainError);
    EXPECT_THROW(analytic_A(-0.1), DomainError);
}

TEST(LabSpectrum, ClosedFormsMatchPolynomialOracle) {
    for (double y = 0.0; y <= 1.0; y += 0.03125) {
        EXPECT_NEAR(analytic_N(y), 5 - 9 * y * y + 4 * y * y * y, 1e-14);
        if (y < 1.0) {
            EXPECT_NEAR(analytic_N(y) * analytic_A(y), -1 + 9 * y * y - 8 * y * y * y, 1e-14);
        }
    }
    for (auto [a, b] : {std::pair{0.0, 1.0}, {0.2, 0.7}, {0.48, 1.0}}) {
        EXPECT_NEAR(N_integral(a, b), oracle::poly_integral(oracle::kN, a, b), 1e-14);
        EXPECT_NEAR(NA_integral(a, b), oracle::poly_integral(oracle::kNA, a, b), 1e-14);
    }
}

TEST(LabSpectrum, AsymmetryZero) {
    const double exact = (1.0 + std::sqrt(33.0)) / 16.0;
    EXPECT_NEAR(asymmetry_zero(), exact, 1e-9);
    EXPECT_NEAR(oracle::bisect([](double y) { return -8 * y * y + y + 1; }, 0.2, 0.6), exact, 1e-12);
}

TEST(LabSpectrum, FOfY) {
    EXPECT_EQ(f_of_y(0.0), 1.0);
    EXPECT_EQ(f_of_y(1.0), 0.0);
    EXPECT_DOUBLE_EQ(f_of_y(0.35), 0.65);
    EXPECT_THROW(f_of_y(1.2), DomainError);
}

TEST(LabSpectrum, BoostReachesEndpoint) {
    const auto beam = MuonBeam::from_constants(load_constants(), 1.0);
    EXPECT_NEAR(beam.E_max, 3.0949, 1e-3);
    const auto e = boost_to_lab({1.0, 1.0, 0.0}, beam, 1);
    EXPECT_NEAR(e.y, 1.0, 1e-12);
    EXPECT_NEAR(e.f, 0.0, 1e-12);
    const auto back = boost_to_lab({1.0, 1.0, 0.0}, beam, -1);
    EXPECT_LT(back.y, 1e-3);
}

TEST(Weights, ParseAndName) {
    for (auto w : {Weighting::N, Weighting::A, Weighting::NA, Weighting::NA2, Weighting::Empirical})
        EXPECT_EQ(parse_weighting(to_string(w)), w);
    EXPECT_THROW(parse_weighting("bogus"), std::exception);
}

TEST(FDistribution, FullWindowNumberWeighted) {
    const auto d = f_distribution(Weight(Weighting::N), {0.0, 3.1}, 3.1);
    EXPECT_NEAR(d.mean, oracle_mean_f(oracle::kN, 0.0, 1.0), 1e-10);
    EXPECT_NEAR(d.mean, 0.65, 1e-12);
    double total = 0.0;
    for (std::size_t k = 0; k < d.density.size(); ++k) total += d.density[k] * (d.edges[k + 1] - d.edges[k]);
    EXPECT_NEAR(total, 1.0, 1e-10);
    EXPECT_NEAR(d.mode, 1.0, 1e-12); // N peaks at y = 0
}

TEST(FDistribution, AnalysisWindowNA2) {
    const double ya = 1.5 / 3.1;
    // NA2 = (N A)^2 / N is not polynomial: cross-check with Simpson.
    auto na2 = [](double y) {
        const double n = 5 - 9 * y * y + 4 * y * y * y;
        const double na = -1 + 9 * y * y - 8 * y * y * y;
        return n > 0 ? na * na / n : 0.0;
    };
    const double oracle_mean = oracle::simpson([&](double y) { return (1 - y) * na2(y); }, ya, 1.0) /
                               oracle::simpson(na2, ya, 1.0);
    const auto d = f_distribution(Weight(Weighting::NA2), {1.5, 3.1}, 3.1);
    EXPECT_NEAR(d.mean, oracle_mean, 1e-8);
    EXPECT_NEAR(d.mean, 0.20, 0.02);
    // NA weighting is polynomial.
    const auto dna = f_distribution(Weight(Weighting::NA), {1.5, 3.1}, 3.1);
    EXPECT_NEAR(dna.mean, oracle_mean_f(oracle::kNA, ya, 1.0), 1e-10);
}

TEST(FDistribution, DegenerateWindowIsAPoint) {
    const auto d = f_distribution(Weight(Weighting::N), {1.55, 1.55}, 3.1);
    EXPECT_DOUBLE_EQ(d.mean, 0.5);
    EXPECT_DOUBLE_EQ(d.mode, 0.5);
}

TEST(FDistribution, NegativeNormalizationRejected) {
    // A integrates negative below its zero crossing.
    EXPECT_THROW(f_distribution(Weight(Weighting::NA), {0.0, 1.0}, 3.1), DomainError);
    EXPECT_THROW(f_distribution(Weight(Weighting::N), {0.0, 3.5}, 3.1), DomainError);
}

TEST(Empirical, PiecewiseConstantIntegration) {
    EmpiricalWeights ew{{{0.0, 0.5, 1.0}, {0.5, 1.0, 3.0}}};
    const Weight w(ew);
    EXPECT_EQ(w(0.25), 1.0);
    EXPECT_EQ(w(0.5), 3.0);
    EXPECT_EQ(w(1.0), 3.0);
    // mean f = (1 * 0.375 + 3 * 0.125) / (0.5 + 1.5)
    const double m = integrate_weighted(w, 0.0, 1.0, [](double y) { return 1 - y; }) /
                     integrate_weighted(w, 0.0, 1.0, [](double) { return 1.0; });
    EXPECT_DOUBLE_EQ(m, 0.375);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResult) {
    const auto beam = MuonBeam::from_constants(load_constants(), 1.0);
    const auto a = generate_spectrum(beam, 200000, 5, 1);
    const auto b = generate_spectrum(beam, 200000, 5, 4);
    EXPECT_EQ(a.forward, b.forward);
    EXPECT_EQ(a.backward, b.backward);
    const auto c = generate_spectrum(beam, 200000, 6, 1);
    EXPECT_NE(a.forward, c.forward);
}

TEST(MonteCarlo, LabSpectrumMatchesClosedForm) {
    const auto beam = MuonBeam::from_constants(load_constants(), 1.0);
    const std::uint64_t n = 1000000;
    const auto h = generate_spectrum(beam, n, 2024, 0);
    std::vector<double> obs, exp;
    double chi2_A = 0.0;
    int dof_A = 0;
    for (std::size_t k = 0; k < h.nbins(); ++k) {
        const double nk = double(h.total(k));
        const double e = double(n) * N_integral(h.bin_lo(k), h.bin_hi(k)) / 3.0;
        obs.push_back(nk);
        exp.push_back(e);
        if (nk > 0) {
            const double A = NA_integral(h.bin_lo(k), h.bin_hi(k)) / N_integral(h.bin_lo(k), h.bin_hi(k));
            const double var = (1.0 - A * A) / nk;
            chi2_A += std::pow(h.asymmetry(k, 1.0) - A, 2) / var;
            ++dof_A;
        }
    }
    const auto c = oracle::pearson_merged(obs, exp);
    const double rN = c.chi2 / (c.bins - 1);
    const double rA = chi2_A / dof_A;
    // 99.9% band at ~50 dof
    EXPECT_GT(rN, 0.45);
    EXPECT_LT(rN, 1.75);
    EXPECT_GT(rA, 0.45);
    EXPECT_LT(rA, 1.75);
}
