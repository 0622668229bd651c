#include "mug2/precession.hpp"
#include "mug2/anomaly.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mug2;

constexpr double kPi = std::numbers::pi;

TEST(Precess, SpinAlongFieldIsStationary) {
    const auto r = precess({{0, 0, 0.5}}, 1.0, 1.0, 10.0, 1000);
    EXPECT_EQ(r.final_state.s.x, 0.0);
    EXPECT_EQ(r.final_state.s.y, 0.0);
    EXPECT_EQ(r.final_state.s.z, 0.5);
}

TEST(Precess, QuarterPeriodTurnsTowardMinusY) {
    // omega = 2 mu B = 1, quarter period t = pi / 2
    const auto r = precess({{0.5, 0, 0}}, 0.5, 1.0, kPi / 2, 2000);
    EXPECT_NEAR(r.final_state.s.x, 0.0, 1e-12);
    EXPECT_NEAR(r.final_state.s.y, -0.5, 1e-12);
    EXPECT_NEAR(r.azimuth, kPi / 2, 1e-12);
}

TEST(Precess, FullPeriodReturns) {
    const auto r = precess({{0.3, 0.4, 0.1}}, 0.5, 1.0, 2 * kPi, 4000);
    EXPECT_NEAR(r.final_state.s.x, 0.3, 1e-12);
    EXPECT_NEAR(r.final_state.s.y, 0.4, 1e-12);
    EXPECT_EQ(r.final_state.s.z, 0.1);
    EXPECT_NEAR(r.azimuth, 2 * kPi, 1e-11);
}

TEST(Precess, ObserverSeesEveryStep) {
    int calls = 0;
    double last_t = -1;
    precess({{0.5, 0, 0}}, 0.5, 1.0, 1.0, 10, [&](double t, const Vec3&) {
        ++calls;
        EXPECT_GT(t, last_t);
        last_t = t;
    });
    EXPECT_EQ(calls, 11);
    EXPECT_DOUBLE_EQ(last_t, 1.0);
}

TEST(Precess, NormDriftBound) {
    double worst = 0.0;
    precess({{0.5, 0, 0}}, 0.5, 1.0, 100.0, 10000,
            [&](double, const Vec3& s) { worst = std::max(worst, std::abs(norm(s) - 0.5)); });
    EXPECT_LE(worst, 1e-9);
}

TEST(Precess, PhaseAccuracyOverManyTurns) {
    const double wt = 100.0;
    const auto r = precess({{0.5, 0, 0}}, 0.5, 1.0, wt, 10000);
    EXPECT_LE(std::abs(r.azimuth - wt) / wt, 1e-6);
    EXPECT_NEAR(r.final_state.s.x, 0.5 * std::cos(wt), 1e-6);
    EXPECT_NEAR(r.final_state.s.y, -0.5 * std::sin(wt), 1e-6);
}

TEST(Precess, RejectsBadInput) {
    EXPECT_THROW(precess({{0.5, 0, 0}}, 1.0, 1.0, 1.0, 0), DomainError);
    EXPECT_THROW(precess({{NAN, 0, 0}}, 1.0, 1.0, 1.0, 10), DomainError);
    EXPECT_THROW(precess({{0.5, 0, 0}}, 1.0, INFINITY, 1.0, 10), DomainError);
}

TEST(AngularImpulse, MatchesFiniteDifference) {
    // gamma_nu ds_y over one short step from s = (1/2, 0, 0)
    for (double gamma : {1.0, 5.0, 300.0}) {
        const double mu = 0.7, B = 1.3, dt = 1e-4;
        const auto r = precess({{0.5, 0, 0}}, mu, B, dt, 1);
        const double fd = gamma * r.final_state.s.y;
        const auto imp = delta_Ly_neutrino(gamma, mu, B, dt);
        EXPECT_FALSE(imp.coarse_step);
        EXPECT_NEAR(fd / imp.value, 1.0, 1e-4);
    }
}

TEST(AngularImpulse, CoarseStepFlagged) {
    EXPECT_TRUE(delta_Ly_neutrino(1.0, 1.0, 1.0, 0.005).coarse_step);
    EXPECT_FALSE(delta_Ly_neutrino(1.0, 1.0, 1.0, 0.004).coarse_step);
}

TEST(AngularImpulse, MuonBudgetIdentity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lg(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double g_nu = 1.0 + std::pow(10.0, lg(rng) + 3.0);
        const double g_mu = 1.0 + std::pow(10.0, lg(rng) + 3.0);
        const double mu = std::pow(10.0, lg(rng) - 19.0);
        const double B = std::pow(10.0, lg(rng));
        const double dt = std::pow(10.0, lg(rng));
        const double lhs = 2.0 * delta_Ly_neutrino(g_nu, mu, B, dt).value;
        const double rhs = -g_mu * delta_mu_mu(mu, g_nu, g_mu) * B * dt;
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
    }
}

TEST(AngularImpulse, MuonTakesTwiceTheProperRate) {
    const double mu = 1e-19;
    // Equal boosts: the muon moment shift is twice the neutrino moment.
    EXPECT_DOUBLE_EQ(delta_mu_mu(mu, 29.3, 29.3) / mu, 2.0);
    EXPECT_THROW(delta_mu_mu(mu, 0.5, 29.3), DomainError);
    EXPECT_THROW(delta_mu_mu(mu, 2.0, 0.9), DomainError);
}

TEST(Larmor, NeutrinoRateIsTiny) {
    const auto t = load_constants();
    const double mu_bohr = neutrino_magnetic_moment(1.0, t);
    const double rate = larmor_rate(mu_bohr, {1.45}, t);
    // mu_B B / hbar = 5.788e-5 eV/T * 1.45 T / 6.582e-16 eV s = 1.275e11 /s
    EXPECT_NEAR(larmor_rate(1.0, {1.45}, t), 1.2752e11, 0.0005e11);
    EXPECT_NEAR(rate / 1.2752e11, mu_bohr, 1e-3 * mu_bohr);
    EXPECT_THROW(larmor_rate(1.0, {-1.0}, t), DomainError);
}
