#pragma once

// Effective spin Hamiltonian of a Kramers ion with nuclear spin,
//
//   H = beta_e B.g.S + I.A.S + I.Q.I - beta_n g_n B.I,
//
// in frequency units (GHz). The composite basis is electron (x) nucleus.
// Levels are labeled 1..N in ascending frequency.

#include "ertrans/opalg.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace ertrans::spin {

using opalg::Matrix;
using opalg::Operator;

struct PhysicalConstants {
    double beta_e_GHz_per_T = 13.996245;
    double beta_n_MHz_per_T = 7.622593;
};

struct SpinParams {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d A_MHz = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d Q_MHz = Eigen::Matrix3d::Zero();
    double g_n = 0.0;
    double S = 0.5;
    double I = 3.5;
    PhysicalConstants constants;
    std::string site;
    std::string source;

    int dim() const { return static_cast<int>(std::lround((2.0 * S + 1.0) * (2.0 * I + 1.0))); }
    void validate() const;
};

// Reads the key-value spin-parameter format (see data/er167_yso_site1.params).
// Asymmetric A or Q are symmetrized; a warning is appended when the
// asymmetry exceeds 1 kHz.
SpinParams parse_spin_params(std::string_view text, const std::string& origin, std::vector<std::string>* warnings = nullptr);
SpinParams load_spin_params(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

// (Jx, Jy, Jz) of dimension 2j+1, Jz = diag(j, j-1, ..., -j).
std::array<Operator, 3> spin_matrices(double j);

Operator build_hamiltonian(const SpinParams& params, const Eigen::Vector3d& B_T);

// zeta_i = dH/dB_i = beta_e sum_j g_ij S_j - beta_n g_n I_i, in GHz/T.
std::array<Matrix, 3> zeeman_operators(const SpinParams& params);

struct LevelSet {
    Eigen::VectorXd frequency_GHz;  // ascending
    Matrix vectors;                 // column k <-> label k+1

    int count() const { return static_cast<int>(frequency_GHz.size()); }
    double frequency(int label) const;
};

LevelSet energy_levels(const SpinParams& params, const Eigen::Vector3d& B_T);

// |<m| zeta_i |n>| for i in (D1, D2, b), GHz/T. Labels are 1-based.
Eigen::Vector3d transition_dipole(const SpinParams& params, const Eigen::Vector3d& B_T, int m, int n);

struct SensitivityOptions {
    // Levels closer than this are handled as one degenerate cluster.
    double degeneracy_tol_GHz = 1e-3;
    // Direction used to lift degeneracies when B = 0.
    Eigen::Vector3d probe_axis = Eigen::Vector3d::UnitZ();
};

struct ZeemanSensitivity {
    Eigen::Vector3d nu_Hz_per_T;    // gradient of the transition frequency
    Eigen::Matrix3d C_Hz_per_T2;    // Hessian of the transition frequency
};

// Gradient and Hessian of f_n - f_m (n the upper label) at B.
ZeemanSensitivity zeeman_sensitivity(const SpinParams& params, const Eigen::Vector3d& B_T, int m, int n,
                                     const SensitivityOptions& opts = {});

struct CoherenceModel {
    double delta_B_T = 26e-6;
};

// Worst-case linewidth estimate 1/(pi T2) = S1 dB + S2 dB^2 with S1 = |nu| and
// S2 the largest |eigenvalue| of the second-order coefficient tensor C/2.
// Returns +infinity when the transition is field-insensitive.
double coherence_time(const Eigen::Vector3d& nu_Hz_per_T, const Eigen::Matrix3d& C_Hz_per_T2, const CoherenceModel& model);

struct TransitionRecord {
    int lower = 0;
    int upper = 0;
    double frequency_GHz = 0.0;
    Eigen::Vector3d dipole_GHz_per_T = Eigen::Vector3d::Zero();
    double S1_Hz_per_T = 0.0;
    double S2_Hz_per_T2 = 0.0;
    double T2_s = std::numeric_limits<double>::infinity();
};

struct FrequencyWindow {
    double lo_GHz;
    double hi_GHz;
};

// Every transition with frequency inside [lo, hi], sorted by T2 descending.
std::vector<TransitionRecord> rank_transitions(const SpinParams& params, const Eigen::Vector3d& B_T,
                                               const FrequencyWindow& window, const CoherenceModel& model = {},
                                               const SensitivityOptions& opts = {});

// All transitions at B (no window), unsorted; the building block of
// rank_transitions and find_zefoz.
std::vector<TransitionRecord> all_transitions(const SpinParams& params, const Eigen::Vector3d& B_T,
                                              const CoherenceModel& model = {}, const SensitivityOptions& opts = {});

struct FieldSweep {
    Eigen::Vector3d axis;
    std::vector<double> field_T;
    // levels_GHz[s](k): level that carries label k+1 at the first field,
    // followed continuously by eigenvector overlap.
    std::vector<Eigen::VectorXd> levels_GHz;
};

FieldSweep field_sweep(const SpinParams& params, const Eigen::Vector3d& axis, double B_max_T, int steps,
                       int workers = 1);

struct ZefozPoint {
    Eigen::Vector3d B_T;
    int lower = 0;
    int upper = 0;
    double frequency_GHz = 0.0;
    double S1_Hz_per_T = 0.0;
    double T2_s = 0.0;
};

std::vector<ZefozPoint> find_zefoz(const SpinParams& params, const std::vector<Eigen::Vector3d>& candidates,
                                   double tol_Hz_per_T, const CoherenceModel& model = {},
                                   const SensitivityOptions& opts = {});

// Unit vector for "D1", "D2", "b" (also "x", "y", "z").
Eigen::Vector3d axis_from_name(const std::string& name);

}  // namespace ertrans::spin
