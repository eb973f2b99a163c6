#include "ertrans/cli/commands.hpp"

#include "ertrans/csv.hpp"
#include "ertrans/error.hpp"
#include "ertrans/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace ertrans::cli {

namespace fs = std::filesystem;
using csv::format;
using experiments::SweptParameter;
using protocol::ProtocolParams;

namespace {

void stamp_config(csv::Table& t, const RunConfig& cfg) {
    for (const auto& [k, v] : resolved_entries(cfg)) t.add_meta("config." + k, v);
}

void stamp_spin(csv::Table& t, const RunConfig& cfg, const spin::SpinParams& sp) {
    t.add_meta("tool", std::string("ertrans ") + ERTRANS_VERSION);
    t.add_meta("spin_site", sp.site);
    t.add_meta("spin_source", sp.source);
    t.add_meta("units", "frequencies GHz, dipoles GHz/T, S1 Hz/T, S2 Hz/T^2, T2 us");
    stamp_config(t, cfg);
}

fs::path save(const csv::Table& t, const RunConfig& cfg, const std::string& name, const csv::PlotSpec* plot,
              std::vector<fs::path>& written) {
    const fs::path path = cfg.out_dir / name;
    t.save(path);
    written.push_back(path);
    if (plot != nullptr) {
        csv::save_gnuplot(path, *plot);
        written.push_back(fs::path(path).replace_extension(".gp"));
    }
    return path;
}

std::string describe(const std::optional<protocol::CalibrationRecord>& rec, const ProtocolParams& p) {
    std::ostringstream os;
    os << "orientation " << protocol::to_string(rec ? rec->chosen : p.orientation);
    if (rec) {
        os << " (calibrated: as_printed " << std::setprecision(4) << rec->efficiency_as_printed << ", reversed "
           << rec->efficiency_reversed << ")";
    }
    return os.str();
}

std::string pair_label(int lo, int hi) { return std::to_string(lo) + "<->" + std::to_string(hi); }

double us(double seconds) { return seconds * 1e6; }

std::vector<std::string> transition_cells(const spin::TransitionRecord& r) {
    return {pair_label(r.lower, r.upper),
            format(r.frequency_GHz),
            format(r.dipole_GHz_per_T(0)),
            format(r.dipole_GHz_per_T(1)),
            format(r.dipole_GHz_per_T(2)),
            format(r.S1_Hz_per_T),
            format(r.S2_Hz_per_T2),
            format(us(r.T2_s))};
}

const std::vector<std::string> kTransitionColumns{"transition", "frequency_GHz", "d_D1_GHz_per_T", "d_D2_GHz_per_T",
                                                  "d_b_GHz_per_T", "S1_Hz_per_T", "S2_Hz_per_T2", "T2_us"};

experiments::SweepSpec base_spec(const RunConfig& cfg) {
    experiments::SweepSpec spec;
    spec.base = cfg.protocol;
    spec.calibrate = cfg.auto_orientation;
    spec.workers = cfg.workers;
    spec.with_noise = true;
    return spec;
}

void print_curve(std::ostream& os, const experiments::Curve& c) {
    const auto& b = c.best();
    os << "  argmax " << experiments::to_string(c.parameter) << " = " << b.value << ": efficiency "
       << std::setprecision(4) << b.result.efficiency << ", fidelity " << b.result.fidelity_snr << ", noise "
       << b.result.noise << "\n";
    os << "  " << describe(c.calibration, b.params) << "\n";
}

std::vector<fs::path> reproduce_fig2(const RunConfig& cfg, std::ostream& os) {
    auto spec = base_spec(cfg);
    spec.values = experiments::grid(0.05, 1.0, 0.005);
    const auto curve = experiments::sweep_alpha(spec);
    auto t = experiments::curve_table(curve);
    stamp_config(t, cfg);
    const csv::PlotSpec plot{"Efficiency, fidelity and noise vs alpha/G", "alpha/G", "",
                             1, {{2, "efficiency"}, {4, "fidelity"}, {3, "noise"}}};
    std::vector<fs::path> out;
    save(t, cfg, "fig2.csv", &plot, out);
    os << "fig2: " << curve.rows.size() << " points\n";
    print_curve(os, curve);
    return out;
}

std::vector<fs::path> reproduce_tfinal(const RunConfig& cfg, std::ostream& os) {
    auto spec = base_spec(cfg);
    spec.values = experiments::grid(0.1, 2.5, 0.05);
    spec.with_noise = false;
    const auto curve = experiments::sweep_protocol_time(spec);
    auto t = experiments::curve_table(curve);
    stamp_config(t, cfg);
    const csv::PlotSpec plot{"Efficiency vs protocol time", "t_f * alpha", "efficiency", 1, {{2, "efficiency"}}};
    std::vector<fs::path> out;
    save(t, cfg, "tfinal_sweep.csv", &plot, out);
    os << "tfinal: " << curve.rows.size() << " points\n";
    print_curve(os, curve);
    return out;
}

std::vector<fs::path> reproduce_fig3a(const RunConfig& cfg, std::ostream& os) {
    const std::vector<double> gammas{0.0008, 1.0};
    const auto curves =
        experiments::sweep_temperature(cfg.protocol, experiments::grid(0.010, 0.300, 0.005), gammas, cfg.workers,
                                       cfg.auto_orientation);
    auto t = experiments::temperature_table(curves);
    stamp_config(t, cfg);
    // gamma_star_over_G is column 13 of the temperature table.
    csv::PlotSpec plot{"SNR fidelity vs temperature", "T (mK)", "fidelity", 1, {}};
    for (double g : gammas) plot.series.push_back({4, "gamma*/G = " + format(g), 13, g});
    std::vector<fs::path> out;
    save(t, cfg, "fig3a.csv", &plot, out);
    os << "fig3a:\n";
    for (const auto& c : curves.curves) {
        const auto at50 = std::find_if(c.rows.begin(), c.rows.end(),
                                       [](const auto& r) { return std::abs(r.value - 0.05) < 1e-9; });
        os << "  gamma*/G = " << c.rows.front().params.gamma_star << ": F(10 mK) = " << std::setprecision(4)
           << c.rows.front().result.fidelity_snr;
        if (at50 != c.rows.end()) os << ", F(50 mK) = " << at50->result.fidelity_snr;
        os << ", F(300 mK) = " << c.rows.back().result.fidelity_snr << "\n";
    }
    return out;
}

std::vector<fs::path> reproduce_fig3b(const RunConfig& cfg, std::ostream& os) {
    const std::vector<double> gammas{0.0008, 0.1, 1.0};
    const auto traces = experiments::efficiency_vs_time(cfg.protocol, gammas, 200, cfg.workers, cfg.auto_orientation);
    auto t = experiments::time_table(traces, cfg.protocol);
    stamp_config(t, cfg);
    csv::PlotSpec plot{"Optical photon number vs time", "t (us)", "<a1+ a1>", 2, {}};
    for (double g : gammas) plot.series.push_back({4, "gamma*/G = " + format(g), 3, g});
    std::vector<fs::path> out;
    save(t, cfg, "fig3b.csv", &plot, out);
    os << "fig3b: final efficiency";
    for (const auto& tr : traces.traces) {
        os << "  [gamma*/G = " << tr.gamma_star << ": " << std::setprecision(4) << tr.result.efficiency << "]";
    }
    os << "\n";
    return out;
}

std::vector<fs::path> reproduce_figA1(const RunConfig& cfg, std::ostream& os) {
    const std::vector<double> alphas{0.1, 0.24, 1.0};
    const auto samples = experiments::schedule_trace(alphas, 20.0, 401, protocol::ScheduleOrientation::AsPrinted);
    auto t = experiments::schedule_table(samples);
    stamp_config(t, cfg);
    csv::PlotSpec plot{"Coupling schedule", "t G", "coupling / G", 2, {}};
    for (double a : alphas) {
        plot.series.push_back({3, "G1, alpha/G = " + format(a), 1, a});
        plot.series.push_back({4, "G2, alpha/G = " + format(a), 1, a});
    }
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, std::abs(s.residual));
    std::vector<fs::path> out;
    save(t, cfg, "figA1.csv", &plot, out);
    os << "figA1: " << samples.size() << " samples, max |G1^2 + G2^2 - G^2| = " << worst << "\n";
    return out;
}

}  // namespace

spin::SpinParams load_spin(const RunConfig& cfg, std::ostream& os) {
    if (!fs::exists(cfg.spin.params_file)) {
        throw Error(ErrorKind::Config,
                    "spin-parameter file '" + cfg.spin.params_file.string() +
                        "' not found; set spin.params_file to a key-value file with keys S, I, g_n, g, A_MHz, Q_MHz "
                        "(3x3 row-major), site, source and an optional [constants] section (see "
                        "data/er167_yso_site1.params)");
    }
    std::vector<std::string> warnings;
    auto p = spin::load_spin_params(cfg.spin.params_file, &warnings);
    for (const auto& w : warnings) os << "warning: " << w << "\n";
    return p;
}

std::vector<fs::path> cmd_protocol_run(const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    ProtocolParams p = cfg.protocol;
    std::optional<protocol::CalibrationRecord> rec;
    if (cfg.auto_orientation) {
        rec = protocol::calibrate_orientation(p);
        p.orientation = rec->chosen;
    }
    const auto r = protocol::run_transfer(p, {cfg.capture_stride, true});

    csv::Table t({"time_over_invG", "time_us", "signal_optical", "signal_microwave", "signal_spin", "noise_optical",
                  "noise_microwave", "noise_spin"});
    experiments::stamp(t, p, rec);
    t.add_meta("efficiency", r.efficiency);
    t.add_meta("noise", r.noise);
    t.add_meta("fidelity_snr", r.fidelity_snr);
    stamp_config(t, cfg);
    const auto& s = r.signal_trace;
    const auto& n = r.noise_trace;
    for (std::size_t i = 0; i < s.time.size(); ++i) {
        const bool hn = i < n.time.size();
        t.add_row(std::vector<double>{s.time[i], s.time[i] / p.G_rad_per_s * 1e6, s.optical[i], s.microwave[i],
                                      s.spin[i], hn ? n.optical[i] : 0.0, hn ? n.microwave[i] : 0.0,
                                      hn ? n.spin[i] : 0.0});
    }
    const csv::PlotSpec plot{"Mode occupations during transfer", "t (us)", "<n>", 2,
                             {{3, "optical"}, {4, "microwave"}, {5, "spin"}, {6, "optical (noise run)"}}};
    std::vector<fs::path> out;
    save(t, cfg, "protocol_run.csv", &plot, out);

    os << std::setprecision(6) << "efficiency   " << r.efficiency << "\n"
       << "noise        " << r.noise << "\n"
       << "fidelity_snr " << r.fidelity_snr << (r.fidelity_flag ? "  (undefined: no signal, reported as 0)" : "")
       << "\n"
       << "nbar         " << r.nbar << "\n"
       << "step         " << r.step << " / G\n"
       << describe(rec, p) << "\n";
    return out;
}

std::vector<fs::path> cmd_protocol_sweep(const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    auto spec = base_spec(cfg);
    spec.parameter = cfg.sweep.parameter;
    spec.values = experiments::grid(cfg.sweep.lo, cfg.sweep.hi, cfg.sweep.step);
    spec.with_noise = cfg.sweep.with_noise;
    const auto curve = experiments::run_sweep(spec);
    auto t = experiments::curve_table(curve);
    stamp_config(t, cfg);
    const std::string name = "sweep_" + experiments::to_string(spec.parameter);
    const csv::PlotSpec plot{"Sweep of " + experiments::to_string(spec.parameter), experiments::to_string(spec.parameter),
                             "", 1, {{2, "efficiency"}, {4, "fidelity"}, {3, "noise"}}};
    std::vector<fs::path> out;
    save(t, cfg, name + ".csv", &plot, out);
    os << name << ": " << curve.rows.size() << " points\n";
    print_curve(os, curve);
    return out;
}

std::vector<fs::path> cmd_spin_levels(const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    const auto sp = load_spin(cfg, os);
    const auto levels = spin::energy_levels(sp, cfg.spin.B_T);
    csv::Table t({"label", "frequency_GHz"});
    stamp_spin(t, cfg, sp);
    for (int k = 0; k < levels.count(); ++k) {
        t.add_row({std::to_string(k + 1), format(levels.frequency_GHz(k))});
        os << std::setw(3) << k + 1 << "  " << std::fixed << std::setprecision(6) << levels.frequency_GHz(k) << " GHz\n";
    }
    os.unsetf(std::ios::fixed);
    std::vector<fs::path> out;
    save(t, cfg, "levels.csv", nullptr, out);
    return out;
}

std::vector<fs::path> cmd_spin_transitions(const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    const auto sp = load_spin(cfg, os);
    const auto ranked = spin::rank_transitions(sp, cfg.spin.B_T, {cfg.spin.window_lo_GHz, cfg.spin.window_hi_GHz},
                                               cfg.spin.coherence(), cfg.spin.sensitivity());
    csv::Table t(kTransitionColumns);
    stamp_spin(t, cfg, sp);
    for (const auto& r : ranked) t.add_row(transition_cells(r));
    std::vector<fs::path> out;
    save(t, cfg, "transitions.csv", nullptr, out);
    os << ranked.size() << " transitions in [" << cfg.spin.window_lo_GHz << ", " << cfg.spin.window_hi_GHz
       << "] GHz\n";
    return out;
}

std::vector<fs::path> cmd_spin_sweep(const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    const auto sp = load_spin(cfg, os);
    const auto sweep =
        spin::field_sweep(sp, spin::axis_from_name(cfg.spin.sweep_axis), cfg.spin.sweep_Bmax_T, cfg.spin.sweep_steps,
                          cfg.workers);
    std::vector<std::string> cols{"B_T"};
    for (int k = 1; k <= sp.dim(); ++k) cols.push_back("level_" + std::to_string(k) + "_GHz");
    csv::Table t(cols);
    stamp_spin(t, cfg, sp);
    for (std::size_t s = 0; s < sweep.field_T.size(); ++s) {
        std::vector<double> row{sweep.field_T[s]};
        for (int k = 0; k < sp.dim(); ++k) row.push_back(sweep.levels_GHz[s](k));
        t.add_row(row);
    }
    csv::PlotSpec plot{"Ground-state levels vs field along " + cfg.spin.sweep_axis, "B (T)", "frequency (GHz)", 1, {}};
    for (int k = 1; k <= sp.dim(); ++k) plot.series.push_back({k + 1, std::to_string(k)});
    std::vector<fs::path> out;
    save(t, cfg, "figA2.csv", &plot, out);
    os << "field sweep: " << sweep.field_T.size() << " points along " << cfg.spin.sweep_axis << " up to "
       << cfg.spin.sweep_Bmax_T << " T\n";
    return out;
}

std::vector<fs::path> cmd_spin_zefoz(const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    const auto sp = load_spin(cfg, os);
    auto points = spin::find_zefoz(sp, {cfg.spin.B_T}, cfg.spin.zefoz_tol_Hz_per_T, cfg.spin.coherence(),
                                   cfg.spin.sensitivity());
    std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.T2_s > b.T2_s; });
    csv::Table t({"transition", "frequency_GHz", "S1_Hz_per_T", "T2_us", "B_D1_T", "B_D2_T", "B_b_T"});
    stamp_spin(t, cfg, sp);
    for (const auto& z : points) {
        t.add_row({pair_label(z.lower, z.upper), format(z.frequency_GHz), format(z.S1_Hz_per_T), format(us(z.T2_s)),
                   format(z.B_T(0)), format(z.B_T(1)), format(z.B_T(2))});
    }
    std::vector<fs::path> out;
    save(t, cfg, "zefoz.csv", nullptr, out);
    os << points.size() << " ZEFOZ transitions (|grad f| < " << cfg.spin.zefoz_tol_Hz_per_T << " Hz/T)\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(points.size(), 10); ++i) {
        const auto& z = points[i];
        os << "  " << std::setw(8) << pair_label(z.lower, z.upper) << "  " << std::fixed << std::setprecision(4)
           << z.frequency_GHz << " GHz  T2 " << std::setprecision(1) << us(z.T2_s) << " us\n";
        os.unsetf(std::ios::fixed);
    }
    return out;
}

namespace {

std::vector<fs::path> reproduce_table1(const RunConfig& cfg, std::ostream& os) {
    const auto sp = load_spin(cfg, os);
    const auto ranked = spin::rank_transitions(sp, cfg.spin.B_T, {cfg.spin.window_lo_GHz, cfg.spin.window_hi_GHz},
                                               cfg.spin.coherence(), cfg.spin.sensitivity());
    csv::Table t(kTransitionColumns);
    stamp_spin(t, cfg, sp);
    const std::size_t n = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(cfg.spin.table_rows));
    os << "Frequency (GHz)         d(D1, D2, b) (GHz/T)        T2 (us)\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = ranked[i];
        t.add_row(transition_cells(r));
        char line[160];
        std::snprintf(line, sizeof line, "%.3f (%2d <-> %2d)     (%.2f, %.2f, %.2f)%*s%.2f\n", r.frequency_GHz, r.lower,
                      r.upper, r.dipole_GHz_per_T(0), r.dipole_GHz_per_T(1), r.dipole_GHz_per_T(2), 6, "",
                      us(r.T2_s));
        os << line;
    }
    std::vector<fs::path> out;
    save(t, cfg, "table1.csv", nullptr, out);
    return out;
}

std::vector<fs::path> append(std::vector<fs::path> a, const std::vector<fs::path>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

const std::vector<std::string>& reproduce_targets() {
    static const std::vector<std::string> t{"fig2", "fig3a", "fig3b", "figA1", "figA2", "table1", "zefoz", "tfinal",
                                            "all"};
    return t;
}

std::vector<fs::path> cmd_reproduce(const std::string& target, const RunConfig& cfg, std::ostream& os) {
    cfg.validate();
    if (target == "fig2") return reproduce_fig2(cfg, os);
    if (target == "fig3a") return reproduce_fig3a(cfg, os);
    if (target == "fig3b") return reproduce_fig3b(cfg, os);
    if (target == "figA1") return reproduce_figA1(cfg, os);
    if (target == "tfinal") return reproduce_tfinal(cfg, os);
    if (target == "table1") return reproduce_table1(cfg, os);
    if (target == "figA2") {
        RunConfig c = cfg;
        c.spin.sweep_axis = "b";
        return cmd_spin_sweep(c, os);
    }
    if (target == "zefoz") {
        RunConfig c = cfg;
        c.spin.B_T = Eigen::Vector3d::Zero();
        return cmd_spin_zefoz(c, os);
    }
    if (target == "all") {
        std::vector<fs::path> out;
        for (const auto& t : reproduce_targets()) {
            if (t != "all") out = append(std::move(out), cmd_reproduce(t, cfg, os));
        }
        return out;
    }
    throw Error(ErrorKind::Config, "unknown reproduce target '" + target + "'");
}

}  // namespace ertrans::cli
