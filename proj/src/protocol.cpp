#include "ertrans/protocol.hpp"

#include "ertrans/error.hpp"

#include <algorithm>
#include <cmath>

namespace ertrans::protocol {

namespace {

constexpr double kHbar = 1.054571817e-34;  // J s
constexpr double kBoltzmann = 1.380649e-23;  // J/K

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

void require(bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorKind::InvalidParameter, msg);
}

}  // namespace

std::string to_string(Direction d) {
    return d == Direction::MicrowaveToOptical ? "mw_to_optical" : "optical_to_mw";
}

std::string to_string(ScheduleOrientation o) {
    return o == ScheduleOrientation::AsPrinted ? "as_printed" : "reversed";
}

std::string to_string(SignalInput s) {
    return s == SignalInput::Photon ? "photon" : "photon_on_thermal";
}

Direction parse_direction(const std::string& s) {
    if (s == "mw_to_optical") return Direction::MicrowaveToOptical;
    if (s == "optical_to_mw") return Direction::OpticalToMicrowave;
    throw Error(ErrorKind::InvalidParameter, "unknown direction '" + s + "'");
}

ScheduleOrientation parse_orientation(const std::string& s) {
    if (s == "as_printed") return ScheduleOrientation::AsPrinted;
    if (s == "reversed") return ScheduleOrientation::Reversed;
    throw Error(ErrorKind::InvalidParameter, "unknown schedule orientation '" + s + "'");
}

SignalInput parse_signal_input(const std::string& s) {
    if (s == "photon") return SignalInput::Photon;
    if (s == "photon_on_thermal") return SignalInput::PhotonOnThermal;
    throw Error(ErrorKind::InvalidParameter, "unknown signal input '" + s + "'");
}

void ProtocolParams::validate() const {
    require(std::isfinite(G_rad_per_s) && G_rad_per_s > 0.0, "G must be > 0");
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be > 0");
    require(finite_nonneg(kappa1), "kappa1 must be >= 0");
    require(finite_nonneg(kappa2), "kappa2 must be >= 0");
    require(finite_nonneg(gamma_s), "gamma_s must be >= 0");
    require(finite_nonneg(gamma_star), "gamma_star must be >= 0");
    require(std::isfinite(omega_mw_rad_per_s) && omega_mw_rad_per_s > 0.0, "microwave frequency must be > 0");
    require(finite_nonneg(temperature_K), "temperature must be >= 0");
    require(std::isfinite(time_ratio) && time_ratio > 0.0, "protocol time must be > 0");
    require(std::isfinite(steps_per_unit) && steps_per_unit >= 1.0, "steps_per_unit must be >= 1");
    if (step_override) require(std::isfinite(*step_override) && *step_override > 0.0, "step must be > 0");
    (void)space();  // validates truncations
}

double ProtocolParams::step() const {
    const double h = step_override.value_or(std::min(1.0 / alpha, 1.0) / steps_per_unit);
    return std::min(h, t_final());
}

CouplingPair coupling_schedule(double t, double G, double alpha, ScheduleOrientation orientation) {
    if (!(t >= 0.0)) throw Error(ErrorKind::InvalidParameter, "schedule time must be >= 0");
    const double th = std::tanh(alpha * t);
    // G2 via sqrt(G^2 - G1^2) would lose the exact identity near th -> 1.
    CouplingPair p{G * std::sqrt(th), G * std::sqrt(1.0 - th)};
    if (orientation == ScheduleOrientation::Reversed) std::swap(p.g1, p.g2);
    return p;
}

Operator effective_hamiltonian(double g1, double g2, const ModeSpace& space) {
    if (space.mode_count() != 3) {
        throw Error(ErrorKind::InvalidDimension, "effective Hamiltonian needs exactly three modes (optical, microwave, spin)");
    }
    const Operator a1 = opalg::embed(opalg::annihilation(space.dim(kOpticalMode)), kOpticalMode, space);
    const Operator a2 = opalg::embed(opalg::annihilation(space.dim(kMicrowaveMode)), kMicrowaveMode, space);
    const Operator b = opalg::embed(opalg::annihilation(space.dim(kSpinMode)), kSpinMode, space);
    const Operator x1 = a1 * b.adjoint();
    const Operator x2 = a2 * b.adjoint();
    return g1 * (x1 + x1.adjoint()) + g2 * (x2 + x2.adjoint());
}

Eigenmodes eigenmodes(double g1, double g2) {
    const double g = std::hypot(g1, g2);
    if (!(g > 0.0)) throw Error(ErrorKind::DegenerateModes, "both couplings vanish; eigenmodes are undefined");
    const double r = 1.0 / std::sqrt(2.0);
    Eigenmodes m;
    m.dark = Eigen::Vector3d(-g2 / g, g1 / g, 0.0);
    m.bright_plus = Eigen::Vector3d(r * g1 / g, r * g2 / g, r);
    m.bright_minus = Eigen::Vector3d(r * g1 / g, r * g2 / g, -r);
    m.frequencies = Eigen::Vector3d(0.0, g, -g);
    return m;
}

double thermal_occupation(double omega_rad_per_s, double temperature_K) {
    if (!(omega_rad_per_s > 0.0)) throw Error(ErrorKind::InvalidParameter, "frequency must be > 0");
    if (!(temperature_K >= 0.0)) throw Error(ErrorKind::InvalidParameter, "temperature must be >= 0");
    if (temperature_K == 0.0) return 0.0;
    const double x = kHbar * omega_rad_per_s / (kBoltzmann * temperature_K);
    return 1.0 / std::expm1(x);
}

Fidelity snr_fidelity(double signal, double noise) {
    if (!(signal >= 0.0) || !(noise >= 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "signal and noise must be >= 0");
    }
    if (signal == 0.0 && noise == 0.0) {
        throw Error(ErrorKind::UndefinedFidelity, "signal and noise are both zero");
    }
    if (signal == 0.0) return {0.0, true};
    return {1.0 / (1.0 + noise / signal), false};
}

namespace {

struct ModeOperators {
    Operator n_optical;
    Operator n_microwave;
    Operator n_spin;
};

ModeOperators number_operators(const ModeSpace& space) {
    return {opalg::embed(opalg::number_operator(space.dim(kOpticalMode)), kOpticalMode, space),
            opalg::embed(opalg::number_operator(space.dim(kMicrowaveMode)), kMicrowaveMode, space),
            opalg::embed(opalg::number_operator(space.dim(kSpinMode)), kSpinMode, space)};
}

// Thermal law over n = 0..dim-2, moved up by one quantum.
opalg::DensityMatrix photon_on_thermal(int dim, double nbar) {
    const opalg::DensityMatrix base = opalg::thermal_state(dim - 1 < 2 ? 2 : dim - 1, nbar);
    opalg::Matrix m = opalg::Matrix::Zero(dim, dim);
    const Eigen::Index limit = std::min<Eigen::Index>(base.matrix().rows(), dim - 1);
    for (Eigen::Index n = 0; n < limit; ++n) m(n + 1, n + 1) = base.matrix()(n, n);
    m /= m.trace();
    return opalg::DensityMatrix(Operator(ModeSpace::single(dim), std::move(m)));
}

}  // namespace

lindblad::EvolutionProblem transfer_problem(const ProtocolParams& p, opalg::DensityMatrix initial, int stride) {
    const ModeSpace space = p.space();
    const Operator a1 = opalg::embed(opalg::annihilation(space.dim(kOpticalMode)), kOpticalMode, space);
    const Operator a2 = opalg::embed(opalg::annihilation(space.dim(kMicrowaveMode)), kMicrowaveMode, space);
    const Operator b = opalg::embed(opalg::annihilation(space.dim(kSpinMode)), kSpinMode, space);
    const Operator x1 = a1 * b.adjoint();
    const Operator x2 = a2 * b.adjoint();

    lindblad::TimeDependentHamiltonian h(space);
    const double alpha = p.alpha;
    const auto orientation = p.orientation;
    h.add_term(x1 + x1.adjoint(), [=](double t) { return coupling_schedule(t, 1.0, alpha, orientation).g1; });
    h.add_term(x2 + x2.adjoint(), [=](double t) { return coupling_schedule(t, 1.0, alpha, orientation).g2; });

    std::vector<lindblad::Dissipator> diss;
    diss.emplace_back(a1, p.kappa1);
    diss.emplace_back(a2, p.kappa2);
    diss.emplace_back(b, p.gamma_s);
    diss.emplace_back(b.adjoint() * b, p.gamma_star);

    return lindblad::EvolutionProblem{std::move(h), std::move(diss), std::move(initial), 0.0, p.t_final(), p.step(), stride};
}

namespace {

ObservableTrace observe(const lindblad::EvolutionResult& r, const ModeOperators& ops) {
    ObservableTrace out;
    for (const auto& snap : r.trajectory) {
        const opalg::Matrix rt = snap.rho.matrix().transpose();
        out.time.push_back(snap.time);
        out.optical.push_back(rt.cwiseProduct(ops.n_optical.matrix()).sum().real());
        out.microwave.push_back(rt.cwiseProduct(ops.n_microwave.matrix()).sum().real());
        out.spin.push_back(rt.cwiseProduct(ops.n_spin.matrix()).sum().real());
    }
    return out;
}

double clamp_tiny_negative(double x) { return (x < 0.0 && x > -1e-12) ? 0.0 : x; }

}  // namespace

TransferResult run_transfer(const ProtocolParams& params, const RunOptions& options) {
    params.validate();
    const ModeSpace space = params.space();
    const ModeOperators ops = number_operators(space);
    const bool to_optical = params.direction == Direction::MicrowaveToOptical;
    const Operator& n_out = to_optical ? ops.n_optical : ops.n_microwave;

    TransferResult result;
    result.nbar = thermal_occupation(params.omega_mw_rad_per_s, params.temperature_K);
    result.step = params.step();

    const auto& d = params.dims;
    const opalg::DensityMatrix vac_o = opalg::fock_state(d.optical, 0);
    const opalg::DensityMatrix vac_s = opalg::fock_state(d.spin, 0);
    const opalg::DensityMatrix thermal_mw = opalg::thermal_state(d.microwave, result.nbar);

    std::vector<opalg::DensityMatrix> signal_factors;
    const bool background = params.signal_input == SignalInput::PhotonOnThermal;
    if (to_optical) {
        signal_factors = {vac_o,
                          background ? photon_on_thermal(d.microwave, result.nbar) : opalg::fock_state(d.microwave, 1),
                          vac_s};
    } else {
        signal_factors = {opalg::fock_state(d.optical, 1),
                          background ? thermal_mw : opalg::fock_state(d.microwave, 0), vac_s};
    }

    const auto signal = lindblad::evolve(transfer_problem(params, opalg::product_state(signal_factors), options.capture_stride));
    result.efficiency = clamp_tiny_negative(opalg::expectation(signal.final_state, n_out).real());
    result.max_trace_deviation = signal.max_trace_deviation;
    result.signal_trace = observe(signal, ops);

    if (options.run_noise && result.nbar > 0.0) {
        const auto noise = lindblad::evolve(
            transfer_problem(params, opalg::product_state({vac_o, thermal_mw, vac_s}), options.capture_stride));
        result.noise = clamp_tiny_negative(opalg::expectation(noise.final_state, n_out).real());
        result.max_trace_deviation = std::max(result.max_trace_deviation, noise.max_trace_deviation);
        result.noise_trace = observe(noise, ops);
    }

    if (result.efficiency == 0.0 && result.noise == 0.0) {
        result.fidelity_snr = 0.0;
        result.fidelity_flag = true;
    } else {
        const Fidelity f = snr_fidelity(result.efficiency, result.noise);
        result.fidelity_snr = f.value;
        result.fidelity_flag = f.signal_zero;
    }
    return result;
}

CalibrationRecord calibrate_orientation(const ProtocolParams& params) {
    ProtocolParams p = params;
    const RunOptions signal_only{0, false};
    p.orientation = ScheduleOrientation::AsPrinted;
    const double printed = run_transfer(p, signal_only).efficiency;
    p.orientation = ScheduleOrientation::Reversed;
    const double reversed = run_transfer(p, signal_only).efficiency;
    return {params.direction, printed, reversed,
            reversed > printed ? ScheduleOrientation::Reversed : ScheduleOrientation::AsPrinted};
}

ProtocolParams reference_params() { return ProtocolParams{}; }

}  // namespace ertrans::protocol
