#pragma once

// Dark-state microwave <-> optical transfer through a collective spin mode.
//
// Three bosonic modes in fixed order: optical cavity a1, microwave cavity
// a2, collective spin b. The effective coupling is
//
//   H = G1(t) (a1 b^+ + a1^+ b) + G2(t) (a2 b^+ + a2^+ b),
//
// with G1^2 + G2^2 = G^2 held constant by the tanh schedule. Every rate and
// time below is expressed in units of G (G = 1 internally); the SI value of
// G is kept only for reporting and unit conversion at the boundary.

#include "ertrans/lindblad.hpp"
#include "ertrans/opalg.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace ertrans::protocol {

using opalg::ModeSpace;
using opalg::Operator;

inline constexpr int kOpticalMode = 0;
inline constexpr int kMicrowaveMode = 1;
inline constexpr int kSpinMode = 2;

enum class Direction { MicrowaveToOptical, OpticalToMicrowave };

// as_printed: G1 = G sqrt(tanh(alpha t)), G2 = G sqrt(1 - tanh(alpha t)).
// reversed: the two outputs exchanged.
enum class ScheduleOrientation { AsPrinted, Reversed };

// Photon: the signal run starts from |1> in the input mode, vacuum elsewhere.
// PhotonOnThermal: the input photon rides on the thermal microwave background.
enum class SignalInput { Photon, PhotonOnThermal };

std::string to_string(Direction d);
std::string to_string(ScheduleOrientation o);
std::string to_string(SignalInput s);
Direction parse_direction(const std::string& s);
ScheduleOrientation parse_orientation(const std::string& s);
SignalInput parse_signal_input(const std::string& s);

struct ModeDims {
    int optical = 2;
    int microwave = 6;
    int spin = 2;
};

struct ProtocolParams {
    double G_rad_per_s = 2.0 * 3.14159265358979323846 * 10e6;

    // In units of G.
    double alpha = 0.245;
    double kappa1 = 0.1;
    double kappa2 = 0.001;
    double gamma_s = 0.001;
    double gamma_star = 0.0008;

    double omega_mw_rad_per_s = 2.0 * 3.14159265358979323846 * 1.33e9;
    double temperature_K = 0.05;

    // t_final = time_ratio / alpha
    double time_ratio = 1.0;

    ModeDims dims;
    Direction direction = Direction::MicrowaveToOptical;
    ScheduleOrientation orientation = ScheduleOrientation::AsPrinted;
    SignalInput signal_input = SignalInput::Photon;

    // Default step = min(1/alpha, 1) / steps_per_unit, in units of 1/G.
    double steps_per_unit = 400.0;
    std::optional<double> step_override;

    void validate() const;
    double t_final() const { return time_ratio / alpha; }
    double step() const;
    ModeSpace space() const { return ModeSpace({dims.optical, dims.microwave, dims.spin}); }
};

struct CouplingPair {
    double g1;
    double g2;
};

CouplingPair coupling_schedule(double t, double G, double alpha, ScheduleOrientation orientation);

Operator effective_hamiltonian(double g1, double g2, const ModeSpace& space);

// Mode-coefficient vectors over (a1, a2, b).
struct Eigenmodes {
    Eigen::Vector3d dark;
    Eigen::Vector3d bright_plus;
    Eigen::Vector3d bright_minus;
    Eigen::Vector3d frequencies;  // (0, +sqrt(G1^2+G2^2), -sqrt(G1^2+G2^2))
};

Eigenmodes eigenmodes(double g1, double g2);

// Bose-Einstein mean occupation; 0 at T = 0.
double thermal_occupation(double omega_rad_per_s, double temperature_K);

struct Fidelity {
    double value;
    bool signal_zero;  // no signal: reported as 0
};

Fidelity snr_fidelity(double signal, double noise);

struct ObservableTrace {
    std::vector<double> time;
    std::vector<double> optical;
    std::vector<double> microwave;
    std::vector<double> spin;
};

struct TransferResult {
    double efficiency = 0.0;
    double noise = 0.0;
    double fidelity_snr = 0.0;
    bool fidelity_flag = false;
    double nbar = 0.0;
    double step = 0.0;
    double max_trace_deviation = 0.0;
    ObservableTrace signal_trace;
    ObservableTrace noise_trace;
};

struct RunOptions {
    int capture_stride = 0;
    bool run_noise = true;
};

// Master-equation problem of one run from `initial` over [0, t_final].
lindblad::EvolutionProblem transfer_problem(const ProtocolParams& params, opalg::DensityMatrix initial, int capture_stride = 0);

TransferResult run_transfer(const ProtocolParams& params, const RunOptions& options = {});

// Outcome of evolving both schedule orientations and keeping the one that
// actually carries the photon in the requested direction.
struct CalibrationRecord {
    Direction direction;
    double efficiency_as_printed;
    double efficiency_reversed;
    ScheduleOrientation chosen;
};

CalibrationRecord calibrate_orientation(const ProtocolParams& params);

// Reference operating point: G/2pi = 10 MHz, alpha = 0.245 G, T = 50 mK.
ProtocolParams reference_params();

}  // namespace ertrans::protocol
