#pragma once

// Parameter sweeps over the transfer protocol and the tables they produce.

#include "ertrans/csv.hpp"
#include "ertrans/protocol.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ertrans::experiments {

using protocol::CalibrationRecord;
using protocol::ProtocolParams;
using protocol::TransferResult;

enum class SweptParameter { Alpha, TimeRatio, TemperatureK, GammaStar, GammaS, Kappa1, Kappa2 };

std::string to_string(SweptParameter p);
SweptParameter parse_swept_parameter(const std::string& s);

// Writes `value` into the matching field of `params`.
void apply(ProtocolParams& params, SweptParameter p, double value);

struct SweepSpec {
    ProtocolParams base;
    SweptParameter parameter = SweptParameter::Alpha;
    std::vector<double> values;
    bool with_noise = true;  // false: efficiency only, noise/fidelity left at 0
    // Evolve both schedule orientations once at `base` and use the better one.
    bool calibrate = true;
    int workers = 1;

    void validate() const;
};

struct SweepRow {
    double value;
    ProtocolParams params;
    TransferResult result;  // observable traces dropped
};

struct Curve {
    SweptParameter parameter;
    std::vector<SweepRow> rows;
    std::size_t argmax = 0;  // row with the highest efficiency
    std::optional<CalibrationRecord> calibration;

    const SweepRow& best() const { return rows.at(argmax); }
};

// lo, lo + step, ..., hi (inclusive, hi snapped when within step/2).
std::vector<double> grid(double lo, double hi, double step);

Curve run_sweep(const SweepSpec& spec);

// Values must lie in (0, 1.5].
Curve sweep_alpha(SweepSpec spec);
// t_final = r / alpha; values are r > 0.
Curve sweep_protocol_time(SweepSpec spec);

struct TemperatureCurves {
    std::vector<double> gamma_star;
    std::vector<Curve> curves;  // one per gamma_star, values in kelvin
};

TemperatureCurves sweep_temperature(const ProtocolParams& base, const std::vector<double>& temperatures_K,
                                    const std::vector<double>& gamma_stars, int workers = 1, bool calibrate = true);

struct TimeTrace {
    double gamma_star;
    TransferResult result;  // signal_trace holds <a1^+ a1>(t)
};

struct TimeTraces {
    std::vector<TimeTrace> traces;
    std::optional<CalibrationRecord> calibration;
};

TimeTraces efficiency_vs_time(const ProtocolParams& base, const std::vector<double>& gamma_stars, int samples = 200,
                              int workers = 1, bool calibrate = true);

struct ScheduleSample {
    double alpha;
    double t;
    double g1;
    double g2;
    double residual;  // g1^2 + g2^2 - G^2
};

// `samples` points per alpha on [0, t_max], G = 1.
std::vector<ScheduleSample> schedule_trace(const std::vector<double>& alphas, double t_max, int samples,
                                           protocol::ScheduleOrientation orientation);

// Tables with provenance: every row carries the resolved parameter set.
void stamp(csv::Table& table, const ProtocolParams& base, const std::optional<CalibrationRecord>& calibration);
csv::Table curve_table(const Curve& curve);
csv::Table temperature_table(const TemperatureCurves& curves);
csv::Table time_table(const TimeTraces& traces, const ProtocolParams& base);
csv::Table schedule_table(const std::vector<ScheduleSample>& samples);

}  // namespace ertrans::experiments
