#ifndef MUG2_DECAYGEN_HPP
#define MUG2_DECAYGEN_HPP

// Polarized muon decay: rest-frame Michel sampling, boost to the lab, the
// lab positron spectrum N(y) and asymmetry A(y), and the neutrino energy
// fraction f = 1 - y.
//
// Positron and neutrinos are massless. The muon spin axis is the beam axis,
// so the rest-frame angle to the spin is also the angle to the boost.

#include "mug2/constants.hpp"
#include "mug2/errors.hpp"
#include "mug2/parallel.hpp"
#include "mug2/relkin.hpp"
#include "mug2/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mug2 {

struct RestFrameDecay {
    double x = 0.0;         // 2 E'_e / m_mu
    double cos_theta = 0.0; // angle to the muon spin
    double phi = 0.0;
};

struct MuonBeam {
    double gamma_mu = 1.0;
    double polarization = 1.0;
    /// Normalisation of y = E_p / E_max.
    double E_max = 1.0;
    double m_mu = 0.1056583755;

    void validate() const {
        if (!(gamma_mu >= 1.0)) throw DomainError("gamma_mu must be >= 1");
        if (!(std::abs(polarization) <= 1.0)) throw DomainError("polarization must lie in [-1, 1]");
        if (!(E_max > 0.0) || !(m_mu > 0.0)) throw DomainError("E_max and m_mu must be positive");
    }

    /// Magic-momentum beam whose y is normalised to the kinematic endpoint.
    static MuonBeam from_constants(const ConstantsTable& t, double polarization) {
        MuonBeam b{t.gamma_magic, polarization, positron_endpoint(t.gamma_magic, t.m_mu), t.m_mu};
        b.validate();
        return b;
    }
};

struct LabEvent {
    double E_p = 0.0;
    double y = 0.0;
    double f = 1.0;
};

/// Michel density x^2 [(3 - 2x) + P (2x - 1) cos(theta)], bounded by 1 + |P|.
inline double michel_density(double x, double cos_theta, double P) {
    return x * x * ((3.0 - 2.0 * x) + P * (2.0 * x - 1.0) * cos_theta);
}

/// Rejection sample of the Michel density against the flat envelope 1 + |P|.
inline RestFrameDecay sample_rest(double P, Stream& rng) {
    if (!(std::abs(P) <= 1.0)) throw DomainError("polarization must lie in [-1, 1]");
    const double envelope = 1.0 + std::abs(P);
    for (;;) {
        const double x = rng.uniform_pos();
        const double c = 2.0 * rng.uniform() - 1.0;
        if (rng.uniform() * envelope < michel_density(x, c, P))
            return {x, c, 2.0 * std::numbers::pi * rng.uniform()};
    }
}

inline double f_of_y(double y) {
    if (!(y >= 0.0 && y <= 1.0)) throw DomainError("y must lie in [0, 1]");
    return 1.0 - y;
}

/// `spin_sign` = -1 flips the spin against the beam direction.
inline LabEvent boost_to_lab(const RestFrameDecay& d, const MuonBeam& beam, int spin_sign = 1) {
    const double E = 0.5 * d.x * beam.m_mu;
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - d.cos_theta * d.cos_theta));
    const FourVector p_rest{E, {E * sin_theta * std::cos(d.phi), E * sin_theta * std::sin(d.phi),
                                E * d.cos_theta * static_cast<double>(spin_sign)}};
    const double v = std::sqrt(1.0 - 1.0 / (beam.gamma_mu * beam.gamma_mu));
    const FourVector p_lab = boost(p_rest, BoostParams::along_z(v));
    const double y = std::clamp(p_lab.t / beam.E_max, 0.0, 1.0);
    return {p_lab.t, y, 1.0 - y};
}

// Lab-frame spectrum and asymmetry for y = E/E_max.

inline void check_unit_interval(double y) {
    if (!(y >= 0.0 && y <= 1.0)) throw DomainError("y must lie in [0, 1], got " + std::to_string(y));
}

/// N(y) = (y - 1)(4y^2 - 5y - 5); integrates to 3 over [0, 1].
inline double analytic_N(double y) {
    check_unit_interval(y);
    return (y - 1.0) * (4.0 * y * y - 5.0 * y - 5.0);
}

/// A(y) = (-8y^2 + y + 1) / (4y^2 - 5y - 5).
inline double analytic_A(double y) {
    check_unit_interval(y);
    return (-8.0 * y * y + y + 1.0) / (4.0 * y * y - 5.0 * y - 5.0);
}

/// Integral of N over [a, b].
inline double N_integral(double a, double b) {
    auto F = [](double y) { return y * y * y * y - 3.0 * y * y * y + 5.0 * y; };
    return F(b) - F(a);
}

/// Integral of N A = -8y^3 + 9y^2 - 1 over [a, b].
inline double NA_integral(double a, double b) {
    auto F = [](double y) { return -2.0 * y * y * y * y + 3.0 * y * y * y - y; };
    return F(b) - F(a);
}

/// Root of A(y) in (0, 1), found numerically.
inline double asymmetry_zero() {
    std::uintmax_t iterations = 200;
    auto r = boost::math::tools::toms748_solve([](double y) { return analytic_A(y); }, 0.2, 0.6,
                                               boost::math::tools::eps_tolerance<double>(52), iterations);
    return 0.5 * (r.first + r.second);
}

// Energy weightings.

enum class Weighting { N, A, NA, NA2, Empirical };

inline std::string to_string(Weighting w) {
    switch (w) {
    case Weighting::N: return "N";
    case Weighting::A: return "A";
    case Weighting::NA: return "NA";
    case Weighting::NA2: return "NA2";
    case Weighting::Empirical: return "empirical";
    }
    return "?";
}

inline Weighting parse_weighting(const std::string& s) {
    if (s == "N") return Weighting::N;
    if (s == "A") return Weighting::A;
    if (s == "NA") return Weighting::NA;
    if (s == "NA2") return Weighting::NA2;
    if (s == "empirical") return Weighting::Empirical;
    throw DomainError("unknown weighting '" + s + "' (expected N, A, NA, NA2 or empirical)");
}

/// Piecewise-constant weight over contiguous y bins; zero outside them.
struct EmpiricalWeights {
    struct Bin {
        double y_lo;
        double y_hi;
        double weight;
    };
    std::vector<Bin> bins;

    double operator()(double y) const {
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const bool last = i + 1 == bins.size();
            if (y >= bins[i].y_lo && (y < bins[i].y_hi || (last && y == bins[i].y_hi))) return bins[i].weight;
        }
        return 0.0;
    }
};

class Weight {
public:
    explicit Weight(Weighting kind) : kind_(kind) {
        if (kind == Weighting::Empirical) throw DomainError("empirical weighting needs ingested bins");
    }
    explicit Weight(EmpiricalWeights bins)
        : kind_(Weighting::Empirical), empirical_(std::make_shared<const EmpiricalWeights>(std::move(bins))) {}

    Weighting kind() const { return kind_; }
    const EmpiricalWeights* empirical() const { return empirical_.get(); }

    double operator()(double y) const {
        switch (kind_) {
        case Weighting::N: return analytic_N(y);
        case Weighting::A: return analytic_A(y);
        case Weighting::NA: return analytic_N(y) * analytic_A(y);
        case Weighting::NA2: {
            const double a = analytic_A(y);
            return analytic_N(y) * a * a;
        }
        case Weighting::Empirical: return (*empirical_)(y);
        }
        return 0.0;
    }

    /// [a, b] split at the weight's discontinuities.
    std::vector<double> breakpoints(double a, double b) const {
        std::vector<double> pts{a};
        if (empirical_) {
            for (const auto& bin : empirical_->bins)
                for (double e : {bin.y_lo, bin.y_hi})
                    if (e > a && e < b) pts.push_back(e);
        }
        pts.push_back(b);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
    }

private:
    Weighting kind_;
    std::shared_ptr<const EmpiricalWeights> empirical_;
};

/// Integral of w(y) g(y) over [a, b] with adaptive Gauss-Kronrod on each
/// smooth piece of w.
template <typename G>
double integrate_weighted(const Weight& w, double a, double b, G&& g, double rel_tol = 1e-10) {
    if (b <= a) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const auto pts = w.breakpoints(a, b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i];
        const double hi = pts[i + 1];
        if (w.kind() == Weighting::Empirical) {
            const double wk = w(0.5 * (lo + hi));
            if (wk == 0.0) continue;
            total += wk * GK::integrate(g, lo, hi, 15, rel_tol);
        } else {
            total += GK::integrate([&](double y) { return w(y) * g(y); }, lo, hi, 15, rel_tol);
        }
    }
    return total;
}

struct GeVWindow {
    double lo = 0.0;
    double hi = 0.0;
};

/// Window in GeV to y bounds. Requires 0 <= lo <= hi <= E_max.
inline std::pair<double, double> window_to_y(GeVWindow window, double E_max) {
    if (!(window.lo >= 0.0) || !(window.hi <= E_max * (1.0 + 1e-12)))
        throw DomainError("energy window must lie inside [0, E_max]");
    if (!(window.lo <= window.hi)) throw DomainError("energy window is empty");
    return {window.lo / E_max, std::min(1.0, window.hi / E_max)};
}

struct FDistribution {
    std::vector<double> edges;   // f bin edges, nbins + 1
    std::vector<double> density; // normalised so sum(density * width) = 1
    double mode = 0.0;
    double mean = 0.0;
    Weighting weighting = Weighting::N;
};

/// Distribution of f = 1 - y over an energy window under weight w.
inline FDistribution f_distribution(const Weight& w, GeVWindow window, double E_max, std::size_t nbins = 50) {
    if (nbins == 0) throw DomainError("f_distribution needs at least one bin");
    const auto [ya, yb] = window_to_y(window, E_max);

    FDistribution out;
    out.weighting = w.kind();
    out.edges.resize(nbins + 1);
    for (std::size_t i = 0; i <= nbins; ++i) out.edges[i] = static_cast<double>(i) / static_cast<double>(nbins);
    out.density.assign(nbins, 0.0);
    const double width = 1.0 / static_cast<double>(nbins);

    if (ya == yb) {
        const double f = 1.0 - ya;
        const auto k = std::min(nbins - 1, static_cast<std::size_t>(f * static_cast<double>(nbins)));
        out.density[k] = 1.0 / width;
        out.mode = out.mean = f;
        return out;
    }

    const double norm = integrate_weighted(w, ya, yb, [](double) { return 1.0; });
    if (!(norm > 0.0)) throw DomainError("weight integrates to a non-positive value over the window");
    out.mean = integrate_weighted(w, ya, yb, [](double y) { return 1.0 - y; }) / norm;

    for (std::size_t k = 0; k < nbins; ++k) {
        // f in [edge_k, edge_k+1] <=> y in [1 - edge_k+1, 1 - edge_k]
        const double lo = std::max(ya, 1.0 - out.edges[k + 1]);
        const double hi = std::min(yb, 1.0 - out.edges[k]);
        if (hi > lo) out.density[k] = integrate_weighted(w, lo, hi, [](double) { return 1.0; }) / norm / width;
    }

    constexpr int kGrid = 20000;
    double best = -INFINITY;
    for (int i = 0; i <= kGrid; ++i) {
        const double y = ya + (yb - ya) * static_cast<double>(i) / kGrid;
        const double v = w(y);
        if (v > best) {
            best = v;
            out.mode = 1.0 - y;
        }
    }
    return out;
}

// Monte Carlo generation.

inline constexpr std::uint64_t kEventsPerBlock = 1u << 16;

/// Generates `n_events` lab events in fixed blocks of kEventsPerBlock; block b
/// draws from Stream(seed, b), so the result does not depend on `threads`.
/// Each event's spin points along or against the beam with equal odds.
/// `visit(acc, event, spin_sign)` fills one Acc per block; blocks come back in order.
template <typename Acc, typename Visit>
std::vector<Acc> generate_blocks(const MuonBeam& beam, std::uint64_t n_events, std::uint64_t seed, unsigned threads,
                                 const Acc& empty, Visit&& visit) {
    beam.validate();
    const std::size_t n_blocks = static_cast<std::size_t>((n_events + kEventsPerBlock - 1) / kEventsPerBlock);
    std::vector<Acc> accs(n_blocks, empty);
    parallel_for(n_blocks, threads, [&](std::size_t b) {
        Stream rng(seed, b);
        const std::uint64_t begin = b * kEventsPerBlock;
        const std::uint64_t count = std::min<std::uint64_t>(kEventsPerBlock, n_events - begin);
        for (std::uint64_t i = 0; i < count; ++i) {
            const int sign = (rng.bits() >> 63) ? -1 : 1;
            const RestFrameDecay d = sample_rest(beam.polarization, rng);
            visit(accs[b], boost_to_lab(d, beam, sign), sign);
        }
    });
    return accs;
}

struct SpectrumHistogram {
    std::vector<std::uint64_t> forward;  // spin along the beam
    std::vector<std::uint64_t> backward; // spin against the beam
    std::uint64_t events = 0;

    std::size_t nbins() const { return forward.size(); }
    double bin_lo(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(nbins()); }
    double bin_hi(std::size_t i) const { return static_cast<double>(i + 1) / static_cast<double>(nbins()); }
    std::uint64_t total(std::size_t i) const { return forward[i] + backward[i]; }

    /// (n_fwd - n_bwd) / (P n); NaN for an empty bin or P = 0.
    double asymmetry(std::size_t i, double P) const {
        const auto n = total(i);
        if (n == 0 || P == 0.0) return std::nan("");
        return (static_cast<double>(forward[i]) - static_cast<double>(backward[i])) / (P * static_cast<double>(n));
    }
};

inline SpectrumHistogram generate_spectrum(const MuonBeam& beam, std::uint64_t n_events, std::uint64_t seed,
                                           unsigned threads, std::size_t nbins = 50) {
    if (nbins == 0) throw DomainError("spectrum needs at least one bin");
    SpectrumHistogram empty{std::vector<std::uint64_t>(nbins, 0), std::vector<std::uint64_t>(nbins, 0), 0};
    auto blocks = generate_blocks(beam, n_events, seed, threads, empty,
                                  [nbins](SpectrumHistogram& h, const LabEvent& e, int sign) {
                                      const auto k = std::min(nbins - 1, static_cast<std::size_t>(
                                                                             e.y * static_cast<double>(nbins)));
                                      ++(sign > 0 ? h.forward : h.backward)[k];
                                      ++h.events;
                                  });
    SpectrumHistogram out = empty;
    for (const auto& b : blocks) {
        for (std::size_t k = 0; k < nbins; ++k) {
            out.forward[k] += b.forward[k];
            out.backward[k] += b.backward[k];
        }
        out.events += b.events;
    }
    return out;
}

} // namespace mug2

#endif
