#ifndef MUG2_RELKIN_HPP
#define MUG2_RELKIN_HPP

// Four-vectors, boosts and the rank-2 angular momentum tensor.
//
// Metric (+,-,-,-). Boosts are passive maps from a particle's rest frame to
// the lab: for a particle moving with velocity v along n in the lab,
//   t = gamma (t' + v n.r'),   r_par = gamma (r'_par + v t').

#include "mug2/errors.hpp"

#include <cmath>
#include <string>

namespace mug2 {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(double k, Vec3 a) { return {k * a.x, k * a.y, k * a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double k) { return k * a; }
    friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

struct FourVector {
    double t = 0.0;
    Vec3 r;

    /// Minkowski square t^2 - |r|^2.
    constexpr double interval() const { return t * t - dot(r, r); }
};

class BoostParams {
public:
    /// Throws DomainError unless 0 <= v < 1 and direction is nonzero. The
    /// direction is normalised.
    BoostParams(double v, Vec3 direction) : v_(v) {
        if (!std::isfinite(v) || v < 0.0 || v >= 1.0)
            throw DomainError("boost speed must lie in [0, 1), got " + std::to_string(v));
        const double n = norm(direction);
        if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("boost direction must be a nonzero finite vector");
        dir_ = (1.0 / n) * direction;
        gamma_ = 1.0 / std::sqrt((1.0 - v) * (1.0 + v));
    }

    static BoostParams along_x(double v) { return {v, {1.0, 0.0, 0.0}}; }
    static BoostParams along_z(double v) { return {v, {0.0, 0.0, 1.0}}; }

    double speed() const { return v_; }
    double gamma() const { return gamma_; }
    Vec3 direction() const { return dir_; }

    /// Same speed, opposite direction.
    BoostParams inverse() const { return {v_, -dir_}; }

private:
    double v_;
    double gamma_;
    Vec3 dir_;
};

inline FourVector boost(const FourVector& p, const BoostParams& b) {
    const double g = b.gamma();
    const double v = b.speed();
    const Vec3 n = b.direction();
    const double r_par = dot(n, p.r);
    return {g * (p.t + v * r_par), p.r + ((g - 1.0) * r_par + g * v * p.t) * n};
}

/// Antisymmetric L^{mu nu} held as K^i = L^{0i} and s_i = 1/2 eps_ijk L^{jk}.
struct AngularMomentumTensor {
    Vec3 K;
    Vec3 s;
};

/// L -> Lambda L Lambda^T, written directly in the (K, s) split:
///   K -> gamma K + (1 - gamma) n (n.K) + gamma v (s x n)
///   s -> gamma s + (1 - gamma) n (n.s) + gamma v (n x K)
inline AngularMomentumTensor boost_tensor(const AngularMomentumTensor& T, const BoostParams& b) {
    const double g = b.gamma();
    const double v = b.speed();
    const Vec3 n = b.direction();
    return {
        g * T.K + ((1.0 - g) * dot(n, T.K)) * n + (g * v) * cross(T.s, n),
        g * T.s + ((1.0 - g) * dot(n, T.s)) * n + (g * v) * cross(n, T.K),
    };
}

/// L'^{03} = t' p'_z - E' z' in the rest frame; constant along a free trajectory.
inline double l03_rest(double t_prime, double p_z_prime, double E_prime, double z_prime) {
    return t_prime * p_z_prime - E_prime * z_prime;
}

/// Lab-frame y component of the spin part for a boost along +x:
/// L_y = gamma (s'_y - v L'^{03}).
inline double spin_lab_y(double s_y_rest, const BoostParams& b, double l03) {
    const Vec3 n = b.direction();
    if (std::abs(n.x - 1.0) > 1e-12 || std::abs(n.y) > 1e-12 || std::abs(n.z) > 1e-12)
        throw DomainError("spin_lab_y requires a boost along +x");
    return b.gamma() * (s_y_rest - b.speed() * l03);
}

} // namespace mug2

#endif
