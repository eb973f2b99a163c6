#include "ertrans/experiments.hpp"

#include "ertrans/error.hpp"
#include "ertrans/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ertrans::experiments {

using protocol::ScheduleOrientation;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::vector<std::string>& param_columns() {
    static const std::vector<std::string> cols{
        "G_over_2pi_MHz", "alpha_over_G", "kappa1_over_G",   "kappa2_over_G", "gamma_s_over_G",
        "gamma_star_over_G", "omega_over_2pi_GHz", "temperature_mK", "time_ratio", "t_final_over_invG",
        "step_over_invG", "dim_optical", "dim_microwave", "dim_spin", "direction",
        "orientation", "signal_input"};
    return cols;
}

std::vector<std::string> param_cells(const ProtocolParams& p) {
    using csv::format;
    return {format(p.G_rad_per_s / kTwoPi / 1e6),
            format(p.alpha),
            format(p.kappa1),
            format(p.kappa2),
            format(p.gamma_s),
            format(p.gamma_star),
            format(p.omega_mw_rad_per_s / kTwoPi / 1e9),
            format(p.temperature_K * 1e3),
            format(p.time_ratio),
            format(p.t_final()),
            format(p.step()),
            std::to_string(p.dims.optical),
            std::to_string(p.dims.microwave),
            std::to_string(p.dims.spin),
            protocol::to_string(p.direction),
            protocol::to_string(p.orientation),
            protocol::to_string(p.signal_input)};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<std::string> result_cells(const TransferResult& r) {
    using csv::format;
    return {format(r.efficiency), format(r.noise), format(r.fidelity_snr), r.fidelity_flag ? "1" : "0", format(r.nbar),
            format(r.max_trace_deviation)};
}

const std::vector<std::string> kResultColumns{"efficiency", "noise", "fidelity_snr", "fidelity_undefined", "nbar",
                                              "max_trace_deviation"};

ProtocolParams calibrated(const ProtocolParams& base, bool calibrate, std::optional<CalibrationRecord>& record) {
    ProtocolParams p = base;
    if (calibrate) {
        record = protocol::calibrate_orientation(base);
        p.orientation = record->chosen;
    }
    return p;
}

}  // namespace

std::string to_string(SweptParameter p) {
    switch (p) {
        case SweptParameter::Alpha: return "alpha";
        case SweptParameter::TimeRatio: return "time_ratio";
        case SweptParameter::TemperatureK: return "temperature_K";
        case SweptParameter::GammaStar: return "gamma_star";
        case SweptParameter::GammaS: return "gamma_s";
        case SweptParameter::Kappa1: return "kappa1";
        case SweptParameter::Kappa2: return "kappa2";
    }
    return "?";
}

SweptParameter parse_swept_parameter(const std::string& s) {
    for (auto p : {SweptParameter::Alpha, SweptParameter::TimeRatio, SweptParameter::TemperatureK,
                   SweptParameter::GammaStar, SweptParameter::GammaS, SweptParameter::Kappa1, SweptParameter::Kappa2}) {
        if (to_string(p) == s) return p;
    }
    throw Error(ErrorKind::Config, "unknown sweep parameter '" + s +
                                       "' (alpha, time_ratio, temperature_K, gamma_star, gamma_s, kappa1, kappa2)");
}

void apply(ProtocolParams& params, SweptParameter p, double value) {
    switch (p) {
        case SweptParameter::Alpha: params.alpha = value; break;
        case SweptParameter::TimeRatio: params.time_ratio = value; break;
        case SweptParameter::TemperatureK: params.temperature_K = value; break;
        case SweptParameter::GammaStar: params.gamma_star = value; break;
        case SweptParameter::GammaS: params.gamma_s = value; break;
        case SweptParameter::Kappa1: params.kappa1 = value; break;
        case SweptParameter::Kappa2: params.kappa2 = value; break;
    }
}

void SweepSpec::validate() const {
    base.validate();
    if (values.empty()) throw Error(ErrorKind::InvalidParameter, "sweep needs at least one value");
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidParameter, "sweep values must be finite");
    }
    if (values.size() > 1) {
        const bool up = values[1] > values[0];
        for (std::size_t i = 1; i < values.size(); ++i) {
            if ((up && !(values[i] > values[i - 1])) || (!up && !(values[i] < values[i - 1]))) {
                throw Error(ErrorKind::InvalidParameter, "sweep values must be strictly monotone");
            }
        }
    }
    if (workers < 1) throw Error(ErrorKind::InvalidParameter, "workers must be >= 1");
}

std::vector<double> grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
        throw Error(ErrorKind::InvalidParameter, "grid needs finite lo <= hi and step > 0");
    }
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n + 1));
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

Curve run_sweep(const SweepSpec& spec) {
    spec.validate();
    Curve curve;
    curve.parameter = spec.parameter;
    const ProtocolParams base = calibrated(spec.base, spec.calibrate, curve.calibration);

    curve.rows = parallel_map(spec.values.size(), spec.workers, [&](std::size_t i) {
        ProtocolParams p = base;
        apply(p, spec.parameter, spec.values[i]);
        p.validate();
        TransferResult r = protocol::run_transfer(p, {0, spec.with_noise});
        r.signal_trace = {};
        r.noise_trace = {};
        return SweepRow{spec.values[i], p, std::move(r)};
    });
    for (std::size_t i = 1; i < curve.rows.size(); ++i) {
        if (curve.rows[i].result.efficiency > curve.rows[curve.argmax].result.efficiency) curve.argmax = i;
    }
    return curve;
}

Curve sweep_alpha(SweepSpec spec) {
    for (double a : spec.values) {
        if (!(a > 0.0 && a <= 1.5)) throw Error(ErrorKind::InvalidParameter, "alpha/G values must lie in (0, 1.5]");
    }
    spec.parameter = SweptParameter::Alpha;
    return run_sweep(spec);
}

Curve sweep_protocol_time(SweepSpec spec) {
    for (double r : spec.values) {
        if (!(r > 0.0)) throw Error(ErrorKind::InvalidParameter, "protocol time ratios must be > 0");
    }
    spec.parameter = SweptParameter::TimeRatio;
    return run_sweep(spec);
}

TemperatureCurves sweep_temperature(const ProtocolParams& base, const std::vector<double>& temperatures_K,
                                    const std::vector<double>& gamma_stars, int workers, bool calibrate) {
    for (double t : temperatures_K) {
        if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameter, "temperatures must be > 0");
    }
    if (gamma_stars.empty()) throw Error(ErrorKind::InvalidParameter, "need at least one dephasing rate");
    std::optional<CalibrationRecord> record;
    const ProtocolParams resolved = calibrated(base, calibrate, record);

    TemperatureCurves out;
    out.gamma_star = gamma_stars;
    for (double g : gamma_stars) {
        SweepSpec spec;
        spec.base = resolved;
        spec.base.gamma_star = g;
        spec.parameter = SweptParameter::TemperatureK;
        spec.values = temperatures_K;
        spec.calibrate = false;
        spec.workers = workers;
        Curve c = run_sweep(spec);
        c.calibration = record;
        out.curves.push_back(std::move(c));
    }
    return out;
}

TimeTraces efficiency_vs_time(const ProtocolParams& base, const std::vector<double>& gamma_stars, int samples,
                              int workers, bool calibrate) {
    if (samples < 1) throw Error(ErrorKind::InvalidParameter, "samples must be >= 1");
    if (gamma_stars.empty()) throw Error(ErrorKind::InvalidParameter, "need at least one dephasing rate");
    TimeTraces out;
    const ProtocolParams resolved = calibrated(base, calibrate, out.calibration);
    resolved.validate();
    const double total_steps = std::ceil(resolved.t_final() / resolved.step() - 1e-9);
    const int stride = std::max(1, static_cast<int>(std::ceil(total_steps / samples)));

    out.traces = parallel_map(gamma_stars.size(), workers, [&](std::size_t i) {
        ProtocolParams p = resolved;
        p.gamma_star = gamma_stars[i];
        p.validate();
        TransferResult r = protocol::run_transfer(p, {stride, true});
        r.noise_trace = {};
        return TimeTrace{gamma_stars[i], std::move(r)};
    });
    return out;
}

std::vector<ScheduleSample> schedule_trace(const std::vector<double>& alphas, double t_max, int samples,
                                           ScheduleOrientation orientation) {
    if (samples < 2) throw Error(ErrorKind::InvalidParameter, "schedule trace needs at least 2 samples");
    if (!(t_max > 0.0)) throw Error(ErrorKind::InvalidParameter, "t_max must be > 0");
    std::vector<ScheduleSample> out;
    for (double a : alphas) {
        if (!(a > 0.0)) throw Error(ErrorKind::InvalidParameter, "alpha values must be > 0");
        for (int i = 0; i < samples; ++i) {
            const double t = t_max * i / (samples - 1);
            const auto c = protocol::coupling_schedule(t, 1.0, a, orientation);
            out.push_back({a, t, c.g1, c.g2, c.g1 * c.g1 + c.g2 * c.g2 - 1.0});
        }
    }
    return out;
}

void stamp(csv::Table& table, const ProtocolParams& base, const std::optional<CalibrationRecord>& calibration) {
    table.add_meta("tool", std::string("ertrans ") + ERTRANS_VERSION);
    table.add_meta("units", "rates and alpha in units of G, times in units of 1/G");
    const auto cols = param_columns();
    const auto cells = param_cells(base);
    for (std::size_t i = 0; i < cols.size(); ++i) table.add_meta(cols[i], cells[i]);
    if (calibration) {
        table.add_meta("calibration",
                       protocol::to_string(calibration->direction) + ": efficiency as_printed " +
                           csv::format(calibration->efficiency_as_printed) + ", reversed " +
                           csv::format(calibration->efficiency_reversed) + " -> " +
                           protocol::to_string(calibration->chosen));
    } else {
        table.add_meta("calibration", "none (orientation fixed by configuration)");
    }
}

csv::Table curve_table(const Curve& curve) {
    csv::Table t(concat(concat({to_string(curve.parameter)}, kResultColumns), param_columns()));
    if (!curve.rows.empty()) {
        stamp(t, curve.rows.front().params, curve.calibration);
        const auto& best = curve.best();
        t.add_meta("argmax", to_string(curve.parameter) + " = " + csv::format(best.value) + ", efficiency " +
                                 csv::format(best.result.efficiency) + ", fidelity " +
                                 csv::format(best.result.fidelity_snr));
    }
    for (const auto& row : curve.rows) {
        t.add_row(concat(concat({csv::format(row.value)}, result_cells(row.result)), param_cells(row.params)));
    }
    return t;
}

csv::Table temperature_table(const TemperatureCurves& curves) {
    csv::Table t(concat(concat({"temperature_mK"}, kResultColumns), param_columns()));
    if (!curves.curves.empty() && !curves.curves.front().rows.empty()) {
        stamp(t, curves.curves.front().rows.front().params, curves.curves.front().calibration);
    }
    for (const auto& c : curves.curves) {
        for (const auto& row : c.rows) {
            t.add_row(concat(concat({csv::format(row.value * 1e3)}, result_cells(row.result)), param_cells(row.params)));
        }
    }
    return t;
}

csv::Table time_table(const TimeTraces& traces, const ProtocolParams& base) {
    csv::Table t(concat({"time_over_invG", "time_us", "gamma_star_over_G", "optical", "microwave", "spin"},
                        param_columns()));
    ProtocolParams resolved = base;
    if (traces.calibration) resolved.orientation = traces.calibration->chosen;
    stamp(t, resolved, traces.calibration);
    for (const auto& tr : traces.traces) {
        ProtocolParams p = resolved;
        p.gamma_star = tr.gamma_star;
        const auto cells = param_cells(p);
        const auto& s = tr.result.signal_trace;
        for (std::size_t i = 0; i < s.time.size(); ++i) {
            t.add_row(concat({csv::format(s.time[i]), csv::format(s.time[i] / p.G_rad_per_s * 1e6),
                              csv::format(tr.gamma_star), csv::format(s.optical[i]), csv::format(s.microwave[i]),
                              csv::format(s.spin[i])},
                             cells));
        }
    }
    return t;
}

csv::Table schedule_table(const std::vector<ScheduleSample>& samples) {
    csv::Table t({"alpha_over_G", "time_over_invG", "G1_over_G", "G2_over_G", "residual"});
    t.add_meta("tool", std::string("ertrans ") + ERTRANS_VERSION);
    t.add_meta("units", "G = 1");
    for (const auto& s : samples) t.add_row(std::vector<double>{s.alpha, s.t, s.g1, s.g2, s.residual});
    return t;
}

}  // namespace ertrans::experiments
