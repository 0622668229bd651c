#ifndef MUG2_ANOMALY_HPP
#define MUG2_ANOMALY_HPP

// The correction model delta a_mu = C f, its averages over positron energy
// windows, and the comparison rows against the reference anomalies.

#include "mug2/constants.hpp"
#include "mug2/decaygen.hpp"
#include "mug2/errors.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace mug2 {

/// Leading-order Dirac neutrino moment 3 e G_F m_nu / (8 sqrt2 pi^2), in Bohr
/// magnetons (mu_B = e / 2 m_e).
inline double neutrino_magnetic_moment(double m_nu_eV, const ConstantsTable& t) {
    if (!(m_nu_eV >= 0.0)) throw DomainError("neutrino mass must be non-negative");
    const double m_nu = m_nu_eV * 1e-9;
    return 3.0 * t.G_F * t.m_e * m_nu / (4.0 * std::numbers::sqrt2 * std::numbers::pi * std::numbers::pi);
}

struct CorrectionModel {
    double C = 0.0;
    double a_mu_ref = 0.0;
    double E_max = 0.0;

    static CorrectionModel from_constants(const ConstantsTable& t) {
        CorrectionModel m{coefficient_C(t), t.a_mu_ref, t.E_max};
        m.validate();
        return m;
    }

    void validate() const {
        if (!(C >= 5e-9 && C <= 9e-9)) throw ConfigError("coefficient C outside its sanity band [5e-9, 9e-9]");
        if (!(a_mu_ref > 0.0)) throw ConfigError("a_mu_ref must be positive");
        if (!(E_max > 0.0)) throw ConfigError("E_max must be positive");
    }
};

inline double delta_a(double f, const CorrectionModel& model) {
    if (!(f >= 0.0 && f <= 1.0)) throw DomainError("f must lie in [0, 1]");
    return model.C * f;
}

inline double to_ppm(double delta, double a_mu_ref) { return delta / a_mu_ref * 1e6; }
inline double to_ppm(double delta, const ConstantsTable& t) { return to_ppm(delta, t.a_mu_ref); }

struct AveragingConfig {
    GeVWindow window;
    Weight weight{Weighting::NA2};
    double rel_tol = 1e-8;
};

struct AveragedAnomaly {
    /// Weighted mean of f = 1 - y over the window.
    double mean_f = 0.0;
    double mean_abs = 0.0;
    double mean_ppm = 0.0;
    /// Weighted standard deviation of C (1 - y) under w; NaN when w changes sign
    /// so that no spread is defined.
    double sigma_abs = 0.0;
    double sigma_ppm = 0.0;
    Weighting weighting = Weighting::NA2;
    GeVWindow window;
};

inline AveragedAnomaly average_anomaly(const AveragingConfig& cfg, const CorrectionModel& model) {
    const auto [ya, yb] = window_to_y(cfg.window, model.E_max);
    if (!(yb > ya)) throw DomainError("averaging window must have E_lo < E_hi");

    const auto& w = cfg.weight;
    double norm = 0.0, mean_f = 0.0, var_f = 0.0;
    if (const auto* bins = w.empirical()) {
        // Piecewise-constant weights: moments of f = 1 - y in closed form.
        auto clip = [&](const EmpiricalWeights::Bin& b) { return std::pair{std::max(ya, b.y_lo), std::min(yb, b.y_hi)}; };
        for (const auto& b : bins->bins) {
            const auto [lo, hi] = clip(b);
            if (hi > lo) {
                norm += b.weight * (hi - lo);
                mean_f += b.weight * (hi - lo) * (1.0 - 0.5 * (lo + hi));
            }
        }
        if (!(norm > 0.0)) throw DomainError("degenerate weight: empirical bins carry no positive weight in the window");
        mean_f /= norm;
        for (const auto& b : bins->bins) {
            const auto [lo, hi] = clip(b);
            const double u = 1.0 - lo - mean_f, v = 1.0 - hi - mean_f;
            if (hi > lo) var_f += b.weight * (u * u * u - v * v * v) / 3.0;
        }
        var_f /= norm;
    } else {
        norm = integrate_weighted(w, ya, yb, [](double) { return 1.0; }, cfg.rel_tol);
        if (!(norm > 0.0))
            throw DomainError("degenerate weight: integral over the window is " + std::to_string(norm) +
                              " (asymmetry weights go negative at low energy)");
        mean_f = integrate_weighted(w, ya, yb, [](double y) { return 1.0 - y; }, cfg.rel_tol) / norm;
        const double m = mean_f;
        var_f = integrate_weighted(w, ya, yb, [m](double y) { return (1.0 - y - m) * (1.0 - y - m); }, cfg.rel_tol) /
                norm;
    }

    AveragedAnomaly out;
    out.mean_f = mean_f;
    out.mean_abs = model.C * mean_f;
    out.mean_ppm = to_ppm(out.mean_abs, model.a_mu_ref);
    out.sigma_abs = var_f >= 0.0 ? model.C * std::sqrt(var_f) : std::nan("");
    out.sigma_ppm = to_ppm(out.sigma_abs, model.a_mu_ref);
    out.weighting = w.kind();
    out.window = cfg.window;
    return out;
}

/// Reads `E_lo_GeV,E_hi_GeV,counts,asymmetry` rows into w = counts * asymmetry^k.
/// Rows must be sorted, contiguous and non-overlapping.
inline EmpiricalWeights ingest_bins(std::istream& in, double E_max, int asym_power, const std::string& source = "bins") {
    if (asym_power != 1 && asym_power != 2) throw DomainError("asymmetry power must be 1 or 2");
    if (!(E_max > 0.0)) throw DomainError("E_max must be positive");

    static constexpr const char* kHeader = "E_lo_GeV,E_hi_GeV,counts,asymmetry";
    std::string line;
    bool have_header = false;
    int line_no = 0;
    struct Row {
        double lo, hi, counts, asym;
        int line;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!have_header) {
            std::string compact;
            for (char c : line)
                if (c != ' ' && c != '\t') compact += c;
            if (compact != kHeader)
                throw FormatError(source + ":" + std::to_string(line_no) + ": expected header columns " + kHeader);
            have_header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                cells.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError(source + ":" + std::to_string(line_no) + ": malformed number '" + cell + "'");
            }
        }
        if (cells.size() != 4)
            throw FormatError(source + ":" + std::to_string(line_no) + ": expected 4 columns");
        if (!(cells[1] > cells[0]))
            throw FormatError(source + ":" + std::to_string(line_no) + ": bin has E_hi <= E_lo");
        rows.push_back({cells[0], cells[1], cells[2], cells[3], line_no});
    }
    if (!have_header) throw FormatError(source + ": missing header " + std::string(kHeader));
    if (rows.empty()) throw FormatError(source + ": no bins");

    std::string problems;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1];
        const auto& b = rows[i];
        const double tol = 1e-12 * std::max(1.0, std::abs(a.hi));
        if (b.lo < a.hi - tol)
            problems += " rows " + std::to_string(a.line) + "," + std::to_string(b.line) + " overlap;";
        else if (b.lo > a.hi + tol)
            problems += " gap between rows " + std::to_string(a.line) + "," + std::to_string(b.line) + ";";
    }
    if (!problems.empty()) throw FormatError(source + ":" + problems);

    EmpiricalWeights out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const double lo = i == 0 ? r.lo : rows[i - 1].hi;
        out.bins.push_back({lo / E_max, r.hi / E_max, r.counts * std::pow(r.asym, asym_power)});
    }
    return out;
}

inline EmpiricalWeights ingest_bins_file(const std::string& path, double E_max, int asym_power) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("bins file not found: " + path);
    return ingest_bins(in, E_max, asym_power, path);
}

struct ComparisonRow {
    std::string label;
    double central = 0.0;
    double err_low = 0.0;
    double err_high = 0.0;
};

/// Experimental value, one corrected row a_exp - delta a per averaged window,
/// then the data-driven and lattice SM values. Absolute (dimensionless) units.
inline std::vector<ComparisonRow> fig1_table(const std::vector<AveragedAnomaly>& averages, const ConstantsTable& t) {
    for (const char* key : {"a_mu_exp", "a_mu_exp_err", "a_mu_sm_datadriven", "a_mu_sm_datadriven_err",
                            "a_mu_sm_lattice", "a_mu_sm_lattice_err"})
        if (!t.provenance.contains(key)) throw ConfigError(std::string("missing reference entry ") + key);
    if (!(t.a_mu_exp > 0.0) || !(t.a_mu_sm_datadriven > 0.0) || !(t.a_mu_sm_lattice > 0.0))
        throw ConfigError("reference anomalies must be positive");

    std::vector<ComparisonRow> rows;
    rows.push_back({"experiment", t.a_mu_exp, t.a_mu_exp_err, t.a_mu_exp_err});
    for (const auto& avg : averages) {
        const double sigma = std::isnan(avg.sigma_abs) ? 0.0 : avg.sigma_abs;
        const double err = std::hypot(t.a_mu_exp_err, sigma);
        std::ostringstream label;
        label << "corrected " << avg.window.lo << "-" << avg.window.hi << " GeV " << to_string(avg.weighting);
        rows.push_back({label.str(), t.a_mu_exp - avg.mean_abs, err, err});
    }
    rows.push_back({"SM data-driven", t.a_mu_sm_datadriven, t.a_mu_sm_datadriven_err, t.a_mu_sm_datadriven_err});
    rows.push_back({"SM lattice", t.a_mu_sm_lattice, t.a_mu_sm_lattice_err, t.a_mu_sm_lattice_err});
    return rows;
}

} // namespace mug2

#endif
