#ifndef MUG2_WIGGLEFIT_HPP
#define MUG2_WIGGLEFIT_HPP

// Decay-time ensembles with anomalous precession and the five-parameter fit
//
//     rate(t) = N0 / w  exp(-t / tau) [1 + A cos(omega_a t + phi)]
//
// where w is the nominal bin width, so N0 is the count per bin at t = 0.
// Bin contents are exact integrals of the rate over the bin, which keeps the
// model valid for merged (wider) bins.

#include "mug2/anomaly.hpp"
#include "mug2/constants.hpp"
#include "mug2/decaygen.hpp"
#include "mug2/errors.hpp"
#include "mug2/parallel.hpp"
#include "mug2/rng.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mug2 {

struct WiggleParams {
    double N0 = 1.0;
    double tau_lab = 1.0;
    double A = 0.0;
    double omega_a = 0.0;
    double phi = 0.0;

    enum Index : std::size_t { kN0, kTau, kA, kOmega, kPhi, kCount };

    std::array<double, kCount> to_array() const { return {N0, tau_lab, A, omega_a, phi}; }
    static WiggleParams from_array(const std::array<double, kCount>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }

    bool valid() const {
        return N0 > 0.0 && tau_lab > 0.0 && std::abs(A) < 1.0 && std::isfinite(N0) && std::isfinite(tau_lab) &&
               std::isfinite(omega_a) && std::isfinite(phi);
    }
    void validate() const {
        if (!valid()) throw DomainError("wiggle parameters need N0 > 0, tau_lab > 0, |A| < 1 and finite values");
    }
};

inline constexpr std::array<const char*, WiggleParams::kCount> kWiggleParamNames{"N0", "tau_lab", "A", "omega_a",
                                                                                 "phi"};

/// omega_a = a e B / m_mu in rad/s.
inline double omega_a(double a, double B_tesla, const ConstantsTable& t) {
    if (!(B_tesla >= 0.0)) throw DomainError("field magnitude must be non-negative");
    return natural_to_per_second(a * field_to_natural(B_tesla, t) / t.m_mu, t);
}

/// Inverse of omega_a: the anomaly that precesses at omega in field B.
inline double anomaly_from_omega(double omega, double B_tesla, const ConstantsTable& t) {
    return omega / omega_a(1.0, B_tesla, t);
}

struct BinModel {
    double value = 0.0;
    std::array<double, WiggleParams::kCount> grad{};
};

namespace detail {

/// integral of exp(k t) and of t exp(k t) over [t1, t2].
template <typename T>
std::pair<T, T> exp_moments(T k, double t1, double t2) {
    const T e1 = std::exp(k * t1);
    const T e2 = std::exp(k * t2);
    const T I = (e2 - e1) / k;
    const T J = (t2 * e2 - t1 * e1) / k - I / k;
    return {I, J};
}

} // namespace detail

/// Expected content of [t1, t2] and its gradient in (N0, tau, A, omega, phi).
inline BinModel wiggle_bin(const WiggleParams& p, double t1, double t2, double ref_width) {
    using cd = std::complex<double>;
    const double inv_tau = 1.0 / p.tau_lab;
    const double inv_tau2 = inv_tau * inv_tau;

    // exp(-t/tau) part, with expm1 to keep narrow bins accurate.
    const double e1 = std::exp(-t1 * inv_tau);
    const double E = -p.tau_lab * e1 * std::expm1(-(t2 - t1) * inv_tau);
    const double dE_dk = detail::exp_moments(-inv_tau, t1, t2).second;

    const cd k(-inv_tau, p.omega_a);
    const auto [I, J] = detail::exp_moments(k, t1, t2);
    const cd rot = std::polar(1.0, p.phi);
    const cd osc = rot * I;
    const cd osc_k = rot * J;
    const cd i(0.0, 1.0);

    const double scale = p.N0 / ref_width;
    const double shape = E + p.A * osc.real();

    BinModel m;
    m.value = scale * shape;
    m.grad[WiggleParams::kN0] = shape / ref_width;
    m.grad[WiggleParams::kTau] = scale * inv_tau2 * (dE_dk + p.A * osc_k.real());
    m.grad[WiggleParams::kA] = scale * osc.real();
    m.grad[WiggleParams::kOmega] = scale * p.A * (i * osc_k).real();
    m.grad[WiggleParams::kPhi] = scale * p.A * (i * osc).real();
    return m;
}

/// Fraction of the truncated density on [0, t_max] that lies below t.
inline double wiggle_cdf(const WiggleParams& p, double t, double t_max) {
    return wiggle_bin(p, 0.0, t, 1.0).value / wiggle_bin(p, 0.0, t_max, 1.0).value;
}

/// N0 such that the model integrates to n_events over [0, t_max].
inline double normalization_for(WiggleParams p, double n_events, double t_max, double ref_width) {
    p.N0 = 1.0;
    return n_events / wiggle_bin(p, 0.0, t_max, ref_width).value;
}

struct TimeHistogram {
    double bin_width = 1.0;
    std::vector<double> counts; // bin i covers [t0 + i w, t0 + (i+1) w)
    double t0 = 0.0;

    double t_lo(std::size_t i) const { return t0 + bin_width * static_cast<double>(i); }
    double t_hi(std::size_t i) const { return t0 + bin_width * static_cast<double>(i + 1); }
    double t_center(std::size_t i) const { return t0 + bin_width * (static_cast<double>(i) + 0.5); }
    double t_max() const { return t_hi(counts.size() - 1); }
};

/// Draws one decay time on [0, t_max] from exp(-t/tau)[1 + A cos(omega t + phi)],
/// rejecting against exp(-t/tau)(1 + |A|).
inline double sample_decay_time(const WiggleParams& p, double t_max, Stream& rng) {
    const double tail = -std::expm1(-t_max / p.tau_lab);
    const double envelope = 1.0 + std::abs(p.A);
    for (;;) {
        const double t = -p.tau_lab * std::log1p(-rng.uniform() * tail);
        if (rng.uniform() * envelope < 1.0 + p.A * std::cos(p.omega_a * t + p.phi)) return t;
    }
}

inline std::vector<double> synth(const WiggleParams& p, std::uint64_t n_events, double t_max, Stream& rng) {
    if (!(std::abs(p.A) < 1.0) || !(p.tau_lab > 0.0)) throw DomainError("synth needs |A| < 1 and tau_lab > 0");
    if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
    std::vector<double> times(n_events);
    for (auto& t : times) t = sample_decay_time(p, t_max, rng);
    return times;
}

inline constexpr std::uint64_t kTimesPerBlock = 1u << 16;

/// Histogrammed synth over `nbins` bins of `bin_width`. Block b of
/// kTimesPerBlock events draws from Stream(seed, b); counts do not depend on
/// `threads`.
inline TimeHistogram synth_histogram(const WiggleParams& p, std::uint64_t n_events, std::size_t nbins,
                                     double bin_width, std::uint64_t seed, unsigned threads = 1) {
    if (!(std::abs(p.A) < 1.0) || !(p.tau_lab > 0.0)) throw DomainError("synth needs |A| < 1 and tau_lab > 0");
    if (nbins == 0 || !(bin_width > 0.0)) throw DomainError("histogram needs bins of positive width");
    const double t_max = bin_width * static_cast<double>(nbins);
    const std::size_t n_blocks = static_cast<std::size_t>((n_events + kTimesPerBlock - 1) / kTimesPerBlock);
    std::vector<std::vector<std::uint32_t>> partial(n_blocks);
    parallel_for(n_blocks, threads, [&](std::size_t b) {
        Stream rng(seed, b);
        auto& h = partial[b];
        h.assign(nbins, 0);
        const std::uint64_t count = std::min<std::uint64_t>(kTimesPerBlock, n_events - b * kTimesPerBlock);
        for (std::uint64_t i = 0; i < count; ++i) {
            const double t = sample_decay_time(p, t_max, rng);
            ++h[std::min(nbins - 1, static_cast<std::size_t>(t / bin_width))];
        }
    });
    TimeHistogram out{bin_width, std::vector<double>(nbins, 0.0)};
    for (const auto& h : partial)
        for (std::size_t i = 0; i < nbins; ++i) out.counts[i] += h[i];
    return out;
}

// Fitting.

struct FitBin {
    double t1;
    double t2;
    double count;
};

/// Merges consecutive bins until each holds at least `min_count` according
/// to `expected` (one entry per histogram bin); a short remainder at the end
/// joins the last merged bin.
inline std::vector<FitBin> merge_bins(const TimeHistogram& h, const std::vector<double>& expected, double min_count) {
    std::vector<FitBin> out;
    bool open = false;
    FitBin cur{};
    double acc = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (!open) {
            cur = {h.t_lo(i), h.t_hi(i), 0.0};
            acc = 0.0;
            open = true;
        }
        cur.t2 = h.t_hi(i);
        cur.count += h.counts[i];
        acc += expected[i];
        if (acc >= min_count) {
            out.push_back(cur);
            open = false;
        }
    }
    if (open && !out.empty()) {
        out.back().t2 = cur.t2;
        out.back().count += cur.count;
    }
    return out;
}

/// Merging driven by the observed counts themselves.
inline std::vector<FitBin> merge_bins(const TimeHistogram& h, double min_count) {
    return merge_bins(h, h.counts, min_count);
}

/// Bin variance in the chi2. Observed uses max(n, 1). Expected uses the model
/// content, frozen per pass and refreshed until the parameters settle; its
/// fixed point solves the Poisson likelihood equations.
enum class Variance { Observed, Expected };

struct FitOptions {
    std::array<bool, WiggleParams::kCount> fixed{};
    Variance variance = Variance::Expected;
    int max_reweights = 10;
    int max_iterations = 200;
    double tolerance = 1e-10;
    double min_count = 10.0;
    std::size_t min_bins = 20;
    /// Seed omega_a, A and phi from a periodogram scan of
    /// omega_a (1 +- scan_span) before the full fit.
    bool scan_frequency = false;
    double scan_span = 0.15;
};

using Covariance = std::array<std::array<double, WiggleParams::kCount>, WiggleParams::kCount>;

struct FitResult {
    WiggleParams params;
    Covariance covariance{};
    double chi2 = 0.0;
    int ndof = 0;
    bool converged = false;
    int iterations = 0;
    std::string diagnostics;

    double error(std::size_t i) const { return std::sqrt(covariance[i][i]); }
};

namespace detail {

struct Linearization {
    double chi2 = 0.0;
    Eigen::MatrixXd JtJ;
    Eigen::VectorXd Jtr;
};

inline std::vector<double> observed_variance(const std::vector<FitBin>& bins) {
    std::vector<double> v(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) v[i] = std::max(bins[i].count, 1.0);
    return v;
}

inline std::vector<double> expected_variance(const std::vector<FitBin>& bins, const WiggleParams& p,
                                             double ref_width) {
    std::vector<double> v(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i)
        v[i] = std::max(wiggle_bin(p, bins[i].t1, bins[i].t2, ref_width).value, 1.0);
    return v;
}

inline double chi2_of(const std::vector<FitBin>& bins, const std::vector<double>& var, const WiggleParams& p,
                      double ref_width) {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double r = bins[i].count - wiggle_bin(p, bins[i].t1, bins[i].t2, ref_width).value;
        chi2 += r * r / var[i];
    }
    return chi2;
}

inline Linearization linearize(const std::vector<FitBin>& bins, const std::vector<double>& var,
                               const WiggleParams& p, double ref_width, const std::vector<std::size_t>& free) {
    const auto n = static_cast<Eigen::Index>(free.size());
    Linearization lin{0.0, Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
    Eigen::VectorXd g(n);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const auto& b = bins[i];
        const BinModel m = wiggle_bin(p, b.t1, b.t2, ref_width);
        const double inv_var = 1.0 / var[i];
        const double r = b.count - m.value;
        lin.chi2 += r * r * inv_var;
        for (Eigen::Index j = 0; j < n; ++j) g[j] = m.grad[free[j]];
        lin.JtJ.noalias() += inv_var * g * g.transpose();
        lin.Jtr.noalias() += (inv_var * r) * g;
    }
    return lin;
}

/// Equilibrated inverse of a symmetric positive-definite matrix; empty on failure.
inline std::optional<Eigen::MatrixXd> spd_inverse(const Eigen::MatrixXd& M) {
    const Eigen::VectorXd d = M.diagonal();
    if ((d.array() <= 0.0).any() || !d.allFinite()) return std::nullopt;
    const Eigen::VectorXd s = d.array().rsqrt();
    const Eigen::MatrixXd S = s.asDiagonal() * M * s.asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) return std::nullopt;
    // Reject near-singular curvature: smallest pivot relative to unit diagonal.
    const Eigen::VectorXd piv = Eigen::MatrixXd(llt.matrixL()).diagonal();
    if (piv.minCoeff() < 1e-7) return std::nullopt;
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(M.rows(), M.cols()));
    return Eigen::MatrixXd(s.asDiagonal() * inv * s.asDiagonal());
}

/// Best omega on a grid around p.omega_a given an exponential baseline p (A
/// ignored); returns p with omega_a, A and phi replaced.
inline WiggleParams scan_frequency(const std::vector<FitBin>& bins, WiggleParams base, double ref_width,
                                   double span) {
    const double t_last = bins.back().t2;
    WiggleParams flat = base;
    flat.A = 0.0;
    std::vector<double> expected(bins.size()), resid(bins.size()), weight(bins.size()), centre(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) {
        expected[i] = wiggle_bin(flat, bins[i].t1, bins[i].t2, ref_width).value;
        resid[i] = bins[i].count - expected[i];
        weight[i] = 1.0 / std::max(bins[i].count, 1.0);
        centre[i] = 0.5 * (bins[i].t1 + bins[i].t2);
    }
    const double w0 = std::abs(base.omega_a);
    const double step = 0.2 / t_last;
    const auto n_steps = static_cast<long>(std::ceil(2.0 * span * w0 / step));
    double best_gain = -1.0;
    WiggleParams best = base;
    for (long k = 0; k <= n_steps; ++k) {
        const double omega = w0 * (1.0 - span) + step * static_cast<double>(k);
        double cc = 0, cs = 0, ss = 0, rc = 0, rs = 0;
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const double c = expected[i] * std::cos(omega * centre[i]);
            const double s = expected[i] * std::sin(omega * centre[i]);
            cc += weight[i] * c * c;
            cs += weight[i] * c * s;
            ss += weight[i] * s * s;
            rc += weight[i] * resid[i] * c;
            rs += weight[i] * resid[i] * s;
        }
        const double det = cc * ss - cs * cs;
        if (!(det > 0.0)) continue;
        const double a = (ss * rc - cs * rs) / det;
        const double b = (cc * rs - cs * rc) / det;
        const double gain = a * rc + b * rs;
        if (gain > best_gain) {
            best_gain = gain;
            // a cos + b sin = A cos(omega t + phi) with A cos(phi) = a, A sin(phi) = -b
            best.omega_a = omega;
            best.A = std::min(0.95, std::hypot(a, b));
            best.phi = std::atan2(-b, a);
        }
    }
    return best;
}


struct LmState {
    WiggleParams p;
    Linearization lin;
    int iterations = 0;
    bool done = false;
    std::string why;
};

template <typename Options>
LmState levenberg_marquardt(const std::vector<FitBin>& bins, const std::vector<double>& var, WiggleParams p,
                            double w, const std::vector<std::size_t>& free, const Options& opt) {
    LmState st;
    st.p = p;
    st.lin = linearize(bins, var, p, w, free);
    double lambda = 1e-3;
    const double chi2_floor = 1e-24 * static_cast<double>(bins.size());
    st.done = st.lin.chi2 <= chi2_floor;
    if (st.done) st.why = "exact fit";

    while (!st.done && st.iterations < opt.max_iterations) {
        ++st.iterations;
        Eigen::MatrixXd M = st.lin.JtJ;
        M.diagonal() *= (1.0 + lambda);
        const auto inv = spd_inverse(M);
        bool accepted = false;
        if (inv) {
            const Eigen::VectorXd step = *inv * st.lin.Jtr;
            auto trial = st.p.to_array();
            for (std::size_t j = 0; j < free.size(); ++j) trial[free[j]] += step[static_cast<Eigen::Index>(j)];
            const WiggleParams q = WiggleParams::from_array(trial);
            if (q.valid()) {
                const double chi2_new = chi2_of(bins, var, q, w);
                if (chi2_new < st.lin.chi2) {
                    const double rel = (st.lin.chi2 - chi2_new) / st.lin.chi2;
                    st.p = q;
                    st.lin = linearize(bins, var, st.p, w, free);
                    lambda = std::max(lambda / 10.0, 1e-12);
                    accepted = true;
                    if (rel < opt.tolerance || st.lin.chi2 <= chi2_floor) {
                        st.done = true;
                        st.why = "relative chi2 change below tolerance";
                    }
                }
            }
        }
        if (!accepted) {
            lambda *= 10.0;
            if (lambda > 1e16) {
                st.done = true;
                st.why = "no further decrease possible";
            }
        }
    }
    if (!st.done) st.why = "iteration limit reached";
    return st;
}

} // namespace detail

/// Levenberg-Marquardt minimisation of chi2 = sum (n - model)^2 / variance
/// over bins merged to an expected content of at least `min_count` under
/// `init`. Damping grows x10 on a rejected step and shrinks /10 on an accepted
/// one; stops when an accepted step changes
/// chi2 by less than `tolerance` relative, or after `max_iterations`. Problems
/// are reported through `converged` and `diagnostics`, never thrown.
inline FitResult fit(const TimeHistogram& hist, const WiggleParams& init, const FitOptions& opt = {}) {
    FitResult res;
    res.params = init;
    if (hist.counts.empty()) {
        res.diagnostics = "empty histogram";
        return res;
    }
    if (!init.valid()) {
        res.diagnostics = "initial parameters invalid";
        return res;
    }
    // Merge on the initial model so that bin edges do not depend on fluctuations.
    std::vector<double> expected(hist.counts.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        expected[i] = wiggle_bin(init, hist.t_lo(i), hist.t_hi(i), hist.bin_width).value;
    const auto bins = merge_bins(hist, expected, opt.min_count);

    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < WiggleParams::kCount; ++j)
        if (!opt.fixed[j]) free.push_back(j);
    res.ndof = static_cast<int>(bins.size()) - static_cast<int>(free.size());

    if (bins.size() < opt.min_bins) {
        res.diagnostics = "only " + std::to_string(bins.size()) + " usable bins, need " + std::to_string(opt.min_bins);
        return res;
    }

    const double w = hist.bin_width;
    WiggleParams p = init;

    if (opt.scan_frequency && !opt.fixed[WiggleParams::kOmega]) {
        FitOptions flat = opt;
        flat.scan_frequency = false;
        flat.fixed = {false, false, true, true, true};
        WiggleParams start = init;
        start.A = 0.0;
        const FitResult base = fit(hist, start, flat);
        WiggleParams seeded = base.converged ? base.params : init;
        seeded.omega_a = init.omega_a;
        p = detail::scan_frequency(bins, seeded, w, opt.scan_span);
        if (opt.fixed[WiggleParams::kA]) p.A = init.A;
        if (opt.fixed[WiggleParams::kPhi]) p.phi = init.phi;
    }

    auto run = [&](const std::vector<double>& var, WiggleParams from) {
        return detail::levenberg_marquardt(bins, var, from, w, free, opt);
    };

    detail::LmState st;
    if (opt.variance == Variance::Observed) {
        st = run(detail::observed_variance(bins), p);
    } else {
        int total = 0;
        for (int pass = 0; pass < std::max(1, opt.max_reweights); ++pass) {
            st = run(detail::expected_variance(bins, p, w), p);
            total += st.iterations;
            if (!st.done) break;
            // Settled once no free parameter moved by more than 1e-4 of its error.
            const auto cov = detail::spd_inverse(st.lin.JtJ);
            bool settled = cov.has_value();
            const auto a = p.to_array();
            const auto b = st.p.to_array();
            for (std::size_t j = 0; settled && j < free.size(); ++j) {
                const double sigma = std::sqrt((*cov)(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
                if (std::abs(b[free[j]] - a[free[j]]) > 1e-4 * sigma) settled = false;
            }
            p = st.p;
            if (settled) break;
            if (pass + 1 == std::max(1, opt.max_reweights)) {
                st.done = false;
                st.why = "variance reweighting did not settle";
            }
        }
        st.iterations = total;
        if (st.done) st.lin = detail::linearize(bins, detail::expected_variance(bins, st.p, w), st.p, w, free);
    }
    p = st.p;
    const auto& lin = st.lin;
    const bool done = st.done;
    const std::string why = st.why;
    const int it = st.iterations;

    res.params = p;
    res.chi2 = lin.chi2;
    res.iterations = it;
    if (!done) {
        res.diagnostics = why;
        return res;
    }
    const auto cov = detail::spd_inverse(lin.JtJ);
    if (!cov) {
        res.diagnostics = "singular curvature at the optimum (" + why + ")";
        return res;
    }
    for (std::size_t a = 0; a < free.size(); ++a)
        for (std::size_t b = 0; b < free.size(); ++b)
            res.covariance[free[a]][free[b]] = (*cov)(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    res.converged = true;
    res.diagnostics = why;
    return res;
}

// Energy-binned anomaly scan.

struct ScanScenario {
    double B_tesla = 1.45;
    double tau_lab = 64.4e-6;
    double phi = 0.0;
    double t_max = 700e-6;
    double bin_width = 149.2e-9;

    static ScanScenario from_constants(const ConstantsTable& t) {
        ScanScenario s;
        s.B_tesla = t.B_tesla;
        s.tau_lab = mug2::tau_lab(t);
        return s;
    }
};

struct ScanRow {
    GeVWindow bin;
    double E_center = 0.0;
    double f_bar = 0.0;
    double asymmetry = 0.0;
    double a_injected = 0.0;
    double a_fit = 0.0;
    double a_err = 0.0;
    bool ok = false;
    std::string diagnostics;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    std::optional<double> slope;
    std::optional<double> slope_err;
};

/// Weighted least-squares slope of a_fit against f_bar over the usable rows.
inline void fit_slope(ScanResult& r) {
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    int n = 0;
    for (const auto& row : r.rows) {
        if (!row.ok || !(row.a_err > 0.0)) continue;
        const double w = 1.0 / (row.a_err * row.a_err);
        S += w;
        Sx += w * row.f_bar;
        Sy += w * row.a_fit;
        Sxx += w * row.f_bar * row.f_bar;
        Sxy += w * row.f_bar * row.a_fit;
        ++n;
    }
    const double det = S * Sxx - Sx * Sx;
    if (n < 2 || !(det > 0.0)) return;
    r.slope = (S * Sxy - Sx * Sy) / det;
    r.slope_err = std::sqrt(S / det);
}

/// For each energy bin injects a = base_a + C f_bar, synthesises
/// `events_per_bin` decay times with that bin's asymmetry, fits, and converts
/// the fitted omega_a back to an anomaly. Bin j uses seed derive_seed(seed, j).
inline ScanResult binned_scan(const std::vector<GeVWindow>& energy_bins, double base_a, const CorrectionModel& model,
                              const Weight& weight, std::uint64_t events_per_bin, std::uint64_t seed,
                              unsigned threads, const ScanScenario& scenario, const ConstantsTable& table) {
    ScanResult out;
    out.rows.resize(energy_bins.size());
    const auto nbins = static_cast<std::size_t>(std::llround(scenario.t_max / scenario.bin_width));

    for (std::size_t j = 0; j < energy_bins.size(); ++j) {
        auto& row = out.rows[j];
        row.bin = energy_bins[j];
        const auto [ya, yb] = window_to_y(row.bin, model.E_max);
        if (!(yb > ya)) throw DomainError("energy bins must have E_lo < E_hi");
        row.E_center = 0.5 * (row.bin.lo + row.bin.hi);
        const double norm = integrate_weighted(weight, ya, yb, [](double) { return 1.0; });
        if (!(norm > 0.0)) throw DomainError("weight integrates to a non-positive value in an energy bin");
        row.f_bar = integrate_weighted(weight, ya, yb, [](double y) { return 1.0 - y; }) / norm;
        row.asymmetry = NA_integral(ya, yb) / N_integral(ya, yb);
        row.a_injected = base_a + model.C * row.f_bar;
    }

    parallel_for(out.rows.size(), threads, [&](std::size_t j) {
        auto& row = out.rows[j];
        WiggleParams truth{1.0, scenario.tau_lab, row.asymmetry, omega_a(row.a_injected, scenario.B_tesla, table),
                           scenario.phi};
        if (!(std::abs(truth.A) < 1.0)) {
            row.diagnostics = "bin asymmetry out of range";
            return;
        }
        truth.N0 = normalization_for(truth, static_cast<double>(events_per_bin), scenario.t_max, scenario.bin_width);
        const auto hist = synth_histogram(truth, events_per_bin, nbins, scenario.bin_width, derive_seed(seed, j), 1);
        WiggleParams init = truth;
        init.omega_a = omega_a(base_a, scenario.B_tesla, table);
        const FitResult r = fit(hist, init);
        row.ok = r.converged;
        row.diagnostics = r.diagnostics;
        row.a_fit = anomaly_from_omega(r.params.omega_a, scenario.B_tesla, table);
        row.a_err = r.converged ? anomaly_from_omega(r.error(WiggleParams::kOmega), scenario.B_tesla, table) : NAN;
    });

    fit_slope(out);
    return out;
}

} // namespace mug2

#endif
