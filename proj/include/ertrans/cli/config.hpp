#pragma once

// Run configuration: sectioned key-value text with units in the key names.
//
//   [protocol]  physical parameters (rates in units of G)
//   [numerics]  step, truncation, capture stride, workers
//   [sweep]     generic one-parameter sweep for `protocol sweep`
//   [spin]      spin-parameter file, field, window, coherence model
//   [output]    output directory
//
// print_config() emits every key; its output parses back to the same config.

#include "ertrans/experiments.hpp"
#include "ertrans/protocol.hpp"
#include "ertrans/spinham.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace ertrans::cli {

struct SpinSection {
    std::filesystem::path params_file;
    Eigen::Vector3d B_T = Eigen::Vector3d::Zero();
    double window_lo_GHz = 1.0;
    double window_hi_GHz = 3.0;
    double delta_B_uT = 26.0;
    double degeneracy_tol_MHz = 1.0;
    Eigen::Vector3d probe_axis = Eigen::Vector3d::UnitZ();
    double zefoz_tol_Hz_per_T = 1e7;
    std::string sweep_axis = "b";
    double sweep_Bmax_T = 0.2;
    int sweep_steps = 200;
    int table_rows = 5;

    spin::CoherenceModel coherence() const { return {delta_B_uT * 1e-6}; }
    spin::SensitivityOptions sensitivity() const { return {degeneracy_tol_MHz * 1e-3, probe_axis}; }
};

struct SweepSection {
    experiments::SweptParameter parameter = experiments::SweptParameter::Alpha;
    double lo = 0.05;
    double hi = 1.0;
    double step = 0.005;
    bool with_noise = true;
};

struct RunConfig {
    // Boundary values as written in the file; protocol holds them in SI.
    double G_over_2pi_MHz = 10.0;
    double omega_over_2pi_GHz = 1.33;
    double temperature_mK = 50.0;

    protocol::ProtocolParams protocol;
    bool auto_orientation = true;
    int capture_stride = 20;
    int workers = 1;
    SweepSection sweep;
    SpinSection spin;
    std::filesystem::path out_dir = "out";

    static RunConfig defaults();
    void sync_units();
    void validate() const;
};

RunConfig parse_config(std::string_view text, const std::string& origin, RunConfig base = RunConfig::defaults());
RunConfig load_config(const std::filesystem::path& path, RunConfig base = RunConfig::defaults());

// "section.key=value", as given to --set.
void apply_override(RunConfig& cfg, const std::string& assignment);

std::string print_config(const RunConfig& cfg);

// (section.key, value) for every key, in print order.
std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& cfg);

}  // namespace ertrans::cli
