#ifndef MUG2_PRECESSION_HPP
#define MUG2_PRECESSION_HPP

// Spin precession in a uniform field along +z and the angular momentum
// budget of the decay.
//
// The moment vector of a spin-1/2 state is taken as 2 mu s, so |moment| = mu
// at |s| = 1/2 and
//     ds/dt = 2 mu B (s x z) = 2 mu B (s_y, -s_x, 0).
// A spin starting along +x therefore turns towards -y at rate omega = 2 mu B.

#include "mug2/constants.hpp"
#include "mug2/errors.hpp"
#include "mug2/relkin.hpp"

#include <cmath>
#include <cstdint>

namespace mug2 {

struct SpinState {
    Vec3 s;
};

struct FieldConfig {
    double B_tesla = 0.0;
};

struct PrecessionResult {
    SpinState final_state;
    /// Unwrapped azimuth swept about +z, positive in the direction of precession.
    double azimuth = 0.0;
};

namespace detail {

inline Vec3 spin_rate(Vec3 s, double omega) { return {omega * s.y, -omega * s.x, 0.0}; }

inline Vec3 rk4_step(Vec3 s, double omega, double h) {
    const Vec3 k1 = spin_rate(s, omega);
    const Vec3 k2 = spin_rate(s + (0.5 * h) * k1, omega);
    const Vec3 k3 = spin_rate(s + (0.5 * h) * k2, omega);
    const Vec3 k4 = spin_rate(s + h * k3, omega);
    return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct NullObserver {
    void operator()(double, const Vec3&) const {}
};

} // namespace detail

/// Fixed-step classical RK4 over [0, t]. `observe(t_i, s_i)` is called for the
/// initial state and after each of the `steps` steps.
///
/// Accuracy model: with h = t/steps and x = 2 mu B h, each step rescales |s|
/// by 1 - x^6/144 and lags the phase by about x^5/120, so both errors grow
/// linearly in steps.
template <typename Observer = detail::NullObserver>
PrecessionResult precess(SpinState s0, double mu, double B, double t, std::int64_t steps,
                         Observer&& observe = {}) {
    if (steps < 1) throw DomainError("precess needs at least one step");
    if (!std::isfinite(mu) || !std::isfinite(B) || !std::isfinite(t) || !std::isfinite(s0.s.x) ||
        !std::isfinite(s0.s.y) || !std::isfinite(s0.s.z))
        throw DomainError("precess inputs must be finite");

    const double omega = 2.0 * mu * B;
    const double h = t / static_cast<double>(steps);
    Vec3 s = s0.s;
    double azimuth = 0.0;
    observe(0.0, s);
    for (std::int64_t i = 1; i <= steps; ++i) {
        const Vec3 next = detail::rk4_step(s, omega, h);
        // Clockwise about +z counts positive.
        const double c = s.x * next.y - s.y * next.x;
        const double d = s.x * next.x + s.y * next.y;
        azimuth -= std::atan2(c, d);
        s = next;
        observe(h * static_cast<double>(i), s);
    }
    return {{s}, azimuth};
}

/// mu B / hbar in 1/s for a moment given in Bohr magnetons and a field in tesla.
/// Pass the result as `mu` with B = 1 to precess in seconds.
inline double larmor_rate(double mu_bohr, FieldConfig field, const ConstantsTable& table) {
    if (field.B_tesla < 0.0) throw DomainError("field magnitude must be non-negative");
    const double muB_GeV = mu_bohr * field_to_natural(field.B_tesla, table) / (2.0 * table.m_e);
    return natural_to_per_second(muB_GeV, table);
}

struct AngularImpulse {
    double value = 0.0;
    /// Set when 2 mu B dt >= 0.01, where the first-order budget is no longer reliable.
    bool coarse_step = false;
};

/// delta L_y = gamma_nu ds_y/dt dt = -gamma_nu mu_nu B dt for a neutrino whose
/// spin starts along its direction of flight (+x).
inline AngularImpulse delta_Ly_neutrino(double gamma_nu, double mu_nu, double B, double dt) {
    return {-gamma_nu * mu_nu * B * dt, std::abs(2.0 * mu_nu * B * dt) >= 0.01};
}

/// delta mu_mu = 2 mu_nu gamma_nu / gamma_mu: the muon takes up twice the
/// neutrino impulse because both neutrinos fly forward in the lab.
inline double delta_mu_mu(double mu_nu, double gamma_nu, double gamma_mu) {
    if (!(gamma_mu >= 1.0)) throw DomainError("gamma_mu must be >= 1");
    if (!(gamma_nu >= 1.0)) throw DomainError("gamma_nu must be >= 1");
    return 2.0 * mu_nu * gamma_nu / gamma_mu;
}

} // namespace mug2

#endif
