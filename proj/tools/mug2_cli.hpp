#ifndef MUG2_TOOLS_CLI_HPP
#define MUG2_TOOLS_CLI_HPP

// Command-line front end. Data goes to the output stream as CSV (or TSV)
// preceded by '#' metadata lines; diagnostics go to the error stream.
// Exit codes: 0 success, 1 domain/input error, 2 usage error.

#include "mug2/mug2.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mug2::cli {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw UsageError(flag + ": malformed number '" + cell + "'");
        }
    }
    if (out.size() != expected)
        throw UsageError(flag + ": expected " + std::to_string(expected) + " comma-separated values");
    return out;
}

inline GeVWindow parse_window(const std::string& text, const std::string& flag) {
    const auto v = parse_list(text, 2, flag);
    return {v[0], v[1]};
}

inline std::vector<GeVWindow> parse_windows(const std::string& text, const std::string& flag) {
    std::vector<GeVWindow> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) out.push_back(parse_window(item, flag));
    if (out.empty()) throw UsageError(flag + ": no windows given");
    return out;
}

inline std::uint64_t to_count(double v, const std::string& flag) {
    if (!(v >= 1.0) || v > 1e15 || v != std::floor(v)) throw UsageError(flag + ": expected a positive integer");
    return static_cast<std::uint64_t>(v);
}

/// Metadata header, column row and data rows.
class Table {
public:
    Table(std::ostream& out, char sep) : out_(out), sep_(sep) {}

    void meta(const std::string& key, const std::string& value) { out_ << "# " << key << ": " << value << '\n'; }

    void columns(const std::vector<std::string>& names) { row(names); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? std::string(1, sep_) : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ostream& out_;
    char sep_;
};

struct Globals {
    std::string constants_path;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string output;
    std::string format = "csv";
};

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mug2: muon anomaly correction toolkit"};
    app.name("mug2");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string("mug2 ") + kVersion);

    Globals g;
    app.add_option("--constants", g.constants_path, "constants file (key = value); fallback $MUG2_CONSTANTS");
    app.add_option("--seed", g.seed, "master random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker cap; results do not depend on it")->check(CLI::PositiveNumber);
    app.add_option("-o,--output", g.output, "write data to this file instead of standard output");
    app.add_option("--format", g.format, "csv or tsv")->check(CLI::IsMember({"csv", "tsv"}))->capture_default_str();

    // constants
    auto* c_constants = app.add_subcommand("constants", "print the effective constants table");

    // precess
    auto* c_precess = app.add_subcommand("precess", "integrate spin precession about +z");
    std::string s0_text = "0.5,0,0";
    double mu_bohr = 0.0, prec_t = 0.0;
    std::optional<double> prec_B;
    double prec_steps = 1000, prec_every = 1;
    c_precess->add_option("--s0", s0_text, "initial spin x,y,z (units of hbar)")->capture_default_str();
    c_precess->add_option("--mu", mu_bohr, "magnetic moment, Bohr magnetons")->required();
    c_precess->add_option("--B", prec_B, "field, tesla (default from constants)");
    c_precess->add_option("--t", prec_t, "duration, seconds")->required();
    c_precess->add_option("--steps", prec_steps, "RK4 steps")->capture_default_str();
    c_precess->add_option("--every", prec_every, "emit every k-th step")->capture_default_str();

    // spectrum
    auto* c_spectrum = app.add_subcommand("spectrum", "Monte Carlo positron spectrum and f distribution");
    double sp_events = 1e6, sp_pol = 1.0, sp_nbins = 50, sp_fbins = 50;
    std::string sp_window, sp_weighting = "NA2", sp_bins;
    int sp_power = 2;
    c_spectrum->add_option("--events", sp_events, "number of decays")->capture_default_str();
    c_spectrum->add_option("--pol", sp_pol, "muon polarization")->capture_default_str();
    c_spectrum->add_option("--window", sp_window, "energy window lo,hi in GeV (default 0,E_max)");
    c_spectrum->add_option("--weighting", sp_weighting, "N, A, NA, NA2 or empirical")->capture_default_str();
    c_spectrum->add_option("--bins", sp_bins, "empirical bins CSV");
    c_spectrum->add_option("--asym-power", sp_power, "asymmetry exponent k for empirical bins")->check(CLI::Range(1, 2));
    c_spectrum->add_option("--nbins", sp_nbins, "y bins")->capture_default_str();
    c_spectrum->add_option("--fbins", sp_fbins, "f bins")->capture_default_str();

    // correction
    auto* c_correction = app.add_subcommand("correction", "delta a_mu = C f at one energy fraction");
    double cor_f = 0.0;
    std::optional<double> cor_mnu;
    c_correction->add_option("--f", cor_f, "neutrino energy fraction")->required();
    c_correction->add_option("--m-nu", cor_mnu, "also report the neutrino moment for this mass, eV");

    // average
    auto* c_average = app.add_subcommand("average", "window-averaged anomaly correction");
    std::string av_window = "1.5,3.1", av_weighting = "NA2", av_bins;
    int av_power = 2;
    double av_tol = 1e-8;
    c_average->add_option("--window", av_window, "energy window lo,hi in GeV")->capture_default_str();
    c_average->add_option("--weighting", av_weighting, "N, A, NA, NA2 or empirical")->capture_default_str();
    c_average->add_option("--bins", av_bins, "empirical bins CSV");
    c_average->add_option("--asym-power", av_power, "asymmetry exponent k for empirical bins")->check(CLI::Range(1, 2));
    c_average->add_option("--tol", av_tol, "relative quadrature tolerance")->capture_default_str();

    // fig1
    auto* c_fig1 = app.add_subcommand("fig1", "comparison rows: experiment, corrected, SM");
    std::string f1_windows = "1.0,2.7;1.5,3.1", f1_weighting = "NA2", f1_bins;
    int f1_power = 2;
    c_fig1->add_option("--windows", f1_windows, "lo1,hi1;lo2,hi2 in GeV")->capture_default_str();
    c_fig1->add_option("--weighting", f1_weighting, "N, A, NA, NA2 or empirical")->capture_default_str();
    c_fig1->add_option("--bins", f1_bins, "empirical bins CSV");
    c_fig1->add_option("--asym-power", f1_power, "asymmetry exponent k for empirical bins")->check(CLI::Range(1, 2));

    // wiggle
    auto* c_wiggle = app.add_subcommand("wiggle", "synthesise and fit precession data");
    c_wiggle->require_subcommand(1);
    std::optional<double> wg_a, wg_B;
    double wg_phase = 0.0, wg_tmax_us = 700.0, wg_bin_ns = 149.2;

    auto* c_synth = c_wiggle->add_subcommand("synth", "decay-time histogram");
    double sy_n = 1e6, sy_asym = 0.4;
    c_synth->add_option("--n", sy_n, "number of decays")->capture_default_str();
    c_synth->add_option("--a", wg_a, "anomaly (default a_mu_ref)");
    c_synth->add_option("--B", wg_B, "field, tesla (default from constants)");
    c_synth->add_option("--asym", sy_asym, "asymmetry amplitude A")->capture_default_str();
    c_synth->add_option("--phase", wg_phase, "phase, rad")->capture_default_str();
    c_synth->add_option("--t-max-us", wg_tmax_us, "histogram end, microseconds")->capture_default_str();
    c_synth->add_option("--bin-ns", wg_bin_ns, "bin width, nanoseconds")->capture_default_str();

    auto* c_fit = c_wiggle->add_subcommand("fit", "five-parameter fit of a histogram");
    std::string fit_in;
    double fit_asym = 0.4;
    bool fit_no_scan = false;
    std::string fit_variance = "expected";
    c_fit->add_option("--in", fit_in, "histogram CSV (t_bin_center,counts)")->required();
    c_fit->add_option("--a", wg_a, "initial anomaly (default a_mu_ref)");
    c_fit->add_option("--B", wg_B, "field, tesla (default from constants)");
    c_fit->add_option("--asym", fit_asym, "initial asymmetry")->capture_default_str();
    c_fit->add_option("--phase", wg_phase, "initial phase, rad")->capture_default_str();
    c_fit->add_flag("--no-scan", fit_no_scan, "skip the frequency pre-scan");
    c_fit->add_option("--variance", fit_variance, "chi2 bin variance: expected (model) or observed (counts)")
        ->check(CLI::IsMember({"expected", "observed"}));

    auto* c_scan = c_wiggle->add_subcommand("scan", "energy-binned anomaly closure scan");
    std::string sc_bins, sc_range = "1.5,3.1", sc_weighting = "NA2";
    double sc_nbins = 8, sc_events = 1e6, sc_inject = 1.0;
    c_scan->add_option("--bins", sc_bins, "explicit energy bins lo,hi;lo,hi in GeV");
    c_scan->add_option("--range", sc_range, "energy range split into --nbins equal bins")->capture_default_str();
    c_scan->add_option("--nbins", sc_nbins, "number of energy bins")->capture_default_str();
    c_scan->add_option("--events-per-bin", sc_events, "decays per energy bin")->capture_default_str();
    c_scan->add_option("--base-a", wg_a, "energy-independent anomaly (default a_mu_ref)");
    c_scan->add_option("--inject-scale", sc_inject, "multiplier on the injected C f term")->capture_default_str();
    c_scan->add_option("--weighting", sc_weighting, "weighting for f_bar")->capture_default_str();
    c_scan->add_option("--B", wg_B, "field, tesla (default from constants)");
    c_scan->add_option("--phase", wg_phase, "phase, rad")->capture_default_str();
    c_scan->add_option("--t-max-us", wg_tmax_us, "histogram end, microseconds")->capture_default_str();
    c_scan->add_option("--bin-ns", wg_bin_ns, "bin width, nanoseconds")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << "mug2 " << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* sub = &app;
        for (const auto* s = &app; s;) {
            const auto subs = s->get_subcommands();
            if (subs.empty()) break;
            sub = s = subs.front();
        }
        err << sub->help();
        return 2;
    }

    std::ofstream file;
    if (!g.output.empty()) {
        file.open(g.output);
        if (!file) {
            err << "error: cannot open output file " << g.output << '\n';
            return 1;
        }
    }
    std::ostream& data = g.output.empty() ? out : file;
    const char sep = g.format == "tsv" ? '\t' : ',';

    try {
        std::optional<std::string> cpath;
        if (!g.constants_path.empty()) {
            cpath = g.constants_path;
        } else if (const char* env = std::getenv("MUG2_CONSTANTS"); env && *env) {
            cpath = std::string(env);
        }
        const ConstantsTable table = load_constants(cpath);
        const CorrectionModel model = CorrectionModel::from_constants(table);

        Table t(data, sep);
        auto header = [&](const std::string& command, const std::map<std::string, std::string>& config) {
            t.meta("mug2", kVersion);
            t.meta("command", command);
            t.meta("constants", cpath ? *cpath : "defaults");
            for (const auto& [k, v] : config) t.meta(k, v);
        };
        auto load_weight = [&](const std::string& name, const std::string& bins_path, int power) {
            const Weighting w = parse_weighting(name);
            if (w == Weighting::Empirical) {
                if (bins_path.empty()) throw UsageError("--weighting empirical requires --bins");
                return Weight(ingest_bins_file(bins_path, table.E_max, power));
            }
            if (!bins_path.empty()) throw UsageError("--bins is only used with --weighting empirical");
            return Weight(w);
        };

        if (c_constants->parsed()) {
            data << "# mug2 " << kVersion << " constants (" << (cpath ? *cpath : "defaults") << ")\n";
            data << dump_constants(table);
        } else if (c_precess->parsed()) {
            const auto s0 = parse_list(s0_text, 3, "--s0");
            const auto steps = static_cast<std::int64_t>(to_count(prec_steps, "--steps"));
            const auto every = static_cast<std::int64_t>(to_count(prec_every, "--every"));
            const FieldConfig field{prec_B.value_or(table.B_tesla)};
            const double rate = larmor_rate(mu_bohr, field, table);
            header("precess", {{"s0", s0_text}, {"mu_bohr", num(mu_bohr)}, {"B_tesla", num(field.B_tesla)},
                               {"t_s", num(prec_t)}, {"steps", std::to_string(steps)},
                               {"every", std::to_string(every)}, {"omega_rad_per_s", num(2.0 * rate)}});
            t.columns({"t", "sx", "sy", "sz"});
            std::int64_t i = 0;
            precess({{s0[0], s0[1], s0[2]}}, rate, 1.0, prec_t, steps, [&](double time, const Vec3& s) {
                if (i % every == 0 || i == steps) t.row({num(time), num(s.x), num(s.y), num(s.z)});
                ++i;
            });
        } else if (c_spectrum->parsed()) {
            const auto n = to_count(sp_events, "--events");
            const auto nb = static_cast<std::size_t>(to_count(sp_nbins, "--nbins"));
            const auto fb = static_cast<std::size_t>(to_count(sp_fbins, "--fbins"));
            const GeVWindow window = sp_window.empty() ? GeVWindow{0.0, table.E_max} : parse_window(sp_window, "--window");
            const Weight weight = load_weight(sp_weighting, sp_bins, sp_power);
            const MuonBeam beam = MuonBeam::from_constants(table, sp_pol);
            const auto hist = generate_spectrum(beam, n, g.seed, g.threads, nb);
            const auto fd = f_distribution(weight, window, table.E_max, fb);

            header("spectrum", {{"events", std::to_string(n)}, {"seed", std::to_string(g.seed)},
                                {"pol", num(sp_pol)}, {"gamma_mu", num(beam.gamma_mu)},
                                {"y_normalisation_GeV", num(beam.E_max)},
                                {"window_GeV", num(window.lo) + "," + num(window.hi)},
                                {"weighting", to_string(weight.kind())}});
            t.meta("table", "spectrum");
            t.columns({"y", "N_mc", "N_analytic", "A_mc", "A_analytic"});
            for (std::size_t k = 0; k < hist.nbins(); ++k) {
                const double lo = hist.bin_lo(k), hi = hist.bin_hi(k);
                t.row({num(0.5 * (lo + hi)), std::to_string(hist.total(k)),
                       num(static_cast<double>(n) * N_integral(lo, hi) / 3.0), num(hist.asymmetry(k, sp_pol)),
                       num(NA_integral(lo, hi) / N_integral(lo, hi))});
            }
            t.meta("table", "f_distribution");
            t.meta("f_mode", num(fd.mode));
            t.meta("f_mean", num(fd.mean));
            t.columns({"f", "weight"});
            for (std::size_t k = 0; k < fd.density.size(); ++k)
                t.row({num(0.5 * (fd.edges[k] + fd.edges[k + 1])), num(fd.density[k])});
        } else if (c_correction->parsed()) {
            const double d = delta_a(cor_f, model);
            header("correction", {{"f", num(cor_f)}, {"C", num(model.C)}, {"C_quoted", num(kQuotedCoefficient)},
                                  {"a_mu_ref", num(table.a_mu_ref)}});
            std::vector<std::string> cols{"f", "delta_a", "ppm"};
            std::vector<std::string> row{num(cor_f), num(d), num(to_ppm(d, table))};
            if (cor_mnu) {
                cols.push_back("m_nu_eV");
                cols.push_back("mu_nu_bohr");
                row.push_back(num(*cor_mnu));
                row.push_back(num(neutrino_magnetic_moment(*cor_mnu, table)));
            }
            t.columns(cols);
            t.row(row);
        } else if (c_average->parsed()) {
            AveragingConfig cfg{parse_window(av_window, "--window"), load_weight(av_weighting, av_bins, av_power),
                                av_tol};
            const auto avg = average_anomaly(cfg, model);
            header("average", {{"window_GeV", av_window}, {"weighting", to_string(avg.weighting)},
                               {"tolerance", num(av_tol)}, {"C", num(model.C)}});
            t.meta("note", "energy weighting is a modelling choice (N, A, NA, NA2 = counts x asymmetry^2, "
                           "empirical); sigma is the weighted spread of C(1-y) over the window");
            t.columns({"E_lo", "E_hi", "weighting", "mean_abs", "mean_ppm", "sigma_ppm"});
            t.row({num(avg.window.lo), num(avg.window.hi), to_string(avg.weighting), num(avg.mean_abs),
                   num(avg.mean_ppm), num(avg.sigma_ppm)});
        } else if (c_fig1->parsed()) {
            const auto windows = parse_windows(f1_windows, "--windows");
            const Weight weight = load_weight(f1_weighting, f1_bins, f1_power);
            std::vector<AveragedAnomaly> avgs;
            for (const auto& w : windows) avgs.push_back(average_anomaly({w, weight}, model));
            header("fig1", {{"windows_GeV", f1_windows}, {"weighting", to_string(weight.kind())},
                            {"units", "1e-11"}});
            t.columns({"label", "central", "err_low", "err_high"});
            for (const auto& r : fig1_table(avgs, table))
                t.row({r.label, num(r.central * 1e11), num(r.err_low * 1e11), num(r.err_high * 1e11)});
        } else if (c_synth->parsed()) {
            const auto n = to_count(sy_n, "--n");
            const double a = wg_a.value_or(table.a_mu_ref);
            const double B = wg_B.value_or(table.B_tesla);
            const double width = wg_bin_ns * 1e-9;
            const auto nbins = static_cast<std::size_t>(std::ceil(wg_tmax_us * 1e-6 / width - 1e-9));
            WiggleParams p{1.0, tau_lab(table), sy_asym, omega_a(a, B, table), wg_phase};
            p.validate();
            p.N0 = normalization_for(p, static_cast<double>(n), width * static_cast<double>(nbins), width);
            const auto hist = synth_histogram(p, n, nbins, width, g.seed, g.threads);
            header("wiggle synth", {{"n", std::to_string(n)}, {"seed", std::to_string(g.seed)}, {"a", num(a)},
                                    {"B_tesla", num(B)}, {"A", num(sy_asym)}, {"phi", num(wg_phase)},
                                    {"tau_lab_s", num(p.tau_lab)}, {"omega_a_rad_per_s", num(p.omega_a)},
                                    {"N0", num(p.N0)}, {"bin_width_s", num(width)}, {"time_unit", "s"}});
            t.columns({"t_bin_center", "counts"});
            for (std::size_t i = 0; i < hist.counts.size(); ++i) t.row({num(hist.t_center(i)), num(hist.counts[i])});
        } else if (c_fit->parsed()) {
            std::ifstream in(fit_in);
            if (!in) throw NotFoundError("histogram file not found: " + fit_in);
            std::vector<double> centres, counts;
            std::string line;
            int line_no = 0;
            bool header_seen = false;
            while (std::getline(in, line)) {
                ++line_no;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty() || line.front() == '#') continue;
                for (auto& ch : line)
                    if (ch == '\t') ch = ',';
                if (!header_seen) {
                    if (line.rfind("t_bin_center,counts", 0) != 0)
                        throw FormatError(fit_in + ":" + std::to_string(line_no) +
                                          ": expected header t_bin_center,counts");
                    header_seen = true;
                    continue;
                }
                std::vector<double> v;
                try {
                    v = parse_list(line, 2, fit_in + ":" + std::to_string(line_no));
                } catch (const UsageError& e) {
                    throw ParseError(e.what());
                }
                centres.push_back(v[0]);
                counts.push_back(v[1]);
            }
            if (centres.size() < 2) throw FormatError(fit_in + ": need at least two bins");
            TimeHistogram hist;
            hist.bin_width = centres[1] - centres[0];
            hist.t0 = centres[0] - 0.5 * hist.bin_width;
            hist.counts = counts;
            for (std::size_t i = 1; i < centres.size(); ++i)
                if (std::abs(centres[i] - hist.t_center(i)) > 1e-6 * hist.bin_width)
                    throw FormatError(fit_in + ": bins are not uniformly spaced");

            const double B = wg_B.value_or(table.B_tesla);
            const double a0 = wg_a.value_or(table.a_mu_ref);
            WiggleParams init{std::max(1.0, counts.front()), tau_lab(table), fit_asym, omega_a(a0, B, table),
                              wg_phase};
            init.N0 = std::max(1.0, counts.front() * std::exp(hist.t_center(0) / init.tau_lab));
            FitOptions opt;
            opt.scan_frequency = !fit_no_scan;
            opt.variance = fit_variance == "observed" ? Variance::Observed : Variance::Expected;
            const FitResult r = fit(hist, init, opt);

            data << "# mug2: " << kVersion << "\n# command: wiggle fit\n# input: " << fit_in << "\n";
            data << "# constants: " << (cpath ? *cpath : "defaults") << "\n";
            data << "# variance: " << fit_variance << "\n";
            const auto pa = r.params.to_array();
            for (std::size_t j = 0; j < WiggleParams::kCount; ++j) {
                data << kWiggleParamNames[j] << "=" << num(pa[j]) << '\n';
                data << kWiggleParamNames[j] << "_err=" << num(r.error(j)) << '\n';
            }
            data << "a_fit=" << num(anomaly_from_omega(r.params.omega_a, B, table)) << '\n';
            data << "a_err=" << num(anomaly_from_omega(r.error(WiggleParams::kOmega), B, table)) << '\n';
            data << "B_tesla=" << num(B) << '\n';
            data << "chi2=" << num(r.chi2) << "\nndof=" << r.ndof << '\n';
            data << "converged=" << (r.converged ? "true" : "false") << "\niterations=" << r.iterations << '\n';
            data << "diagnostics=" << r.diagnostics << '\n';
            if (!r.converged) err << "warning: fit did not converge: " << r.diagnostics << '\n';
        } else if (c_scan->parsed()) {
            std::vector<GeVWindow> bins;
            if (!sc_bins.empty()) {
                bins = parse_windows(sc_bins, "--bins");
            } else {
                const auto range = parse_window(sc_range, "--range");
                const auto nb = to_count(sc_nbins, "--nbins");
                for (std::uint64_t k = 0; k < nb; ++k)
                    bins.push_back({range.lo + (range.hi - range.lo) * static_cast<double>(k) / static_cast<double>(nb),
                                    range.lo + (range.hi - range.lo) * static_cast<double>(k + 1) / static_cast<double>(nb)});
            }
            const auto n = to_count(sc_events, "--events-per-bin");
            const Weight weight(parse_weighting(sc_weighting));
            CorrectionModel injected = model;
            injected.C = model.C * sc_inject;
            ScanScenario sc = ScanScenario::from_constants(table);
            sc.B_tesla = wg_B.value_or(table.B_tesla);
            sc.phi = wg_phase;
            sc.t_max = wg_tmax_us * 1e-6;
            sc.bin_width = wg_bin_ns * 1e-9;
            const double base_a = wg_a.value_or(table.a_mu_ref);
            const auto res = binned_scan(bins, base_a, injected, weight, n, g.seed, g.threads, sc, table);
            header("wiggle scan", {{"events_per_bin", std::to_string(n)}, {"seed", std::to_string(g.seed)},
                                   {"base_a", num(base_a)}, {"C_injected", num(injected.C)},
                                   {"weighting", to_string(weight.kind())}, {"B_tesla", num(sc.B_tesla)}});
            t.columns({"E_center", "f_bar", "a_fit", "a_err", "a_injected", "converged"});
            for (const auto& r : res.rows)
                t.row({num(r.E_center), num(r.f_bar), num(r.a_fit), num(r.a_err), num(r.a_injected),
                       r.ok ? "true" : "false"});
            if (res.slope)
                t.meta("slope", num(*res.slope) + " +- " + num(*res.slope_err));
            else
                t.meta("slope", "absent (fewer than two usable bins)");
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace mug2::cli

#endif
