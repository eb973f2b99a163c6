#include "ertrans/error.hpp"
#include "ertrans/protocol.hpp"
#include "transfer_oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace ertrans;
using namespace ertrans::protocol;
using opalg::Matrix;

namespace {

// Rows/columns of the one-excitation sector (a1, a2, b) in a (2,2,2) space.
Eigen::Matrix3d single_excitation_block(double g1, double g2) {
    const Matrix h = effective_hamiltonian(g1, g2, ModeSpace({2, 2, 2})).matrix();
    const int idx[3] = {4, 2, 1};  // |100>, |010>, |001>
    Eigen::Matrix3d out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out(r, c) = h(idx[r], idx[c]).real();
    return out;
}

ProtocolParams lossless() {
    ProtocolParams p;
    p.kappa1 = p.kappa2 = p.gamma_s = p.gamma_star = 0.0;
    p.temperature_K = 0.0;
    p.orientation = ScheduleOrientation::Reversed;
    return p;
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("schedule: t = 0 gives (0, G)") {
    const auto c = coupling_schedule(0.0, 1.0, 0.245, ScheduleOrientation::AsPrinted);
    CHECK(c.g1 == 0.0);
    CHECK(c.g2 == 1.0);
}

TEST_CASE("schedule: alpha t = 10") {
    const double G = 2.5;
    const auto c = coupling_schedule(10.0 / 0.3, G, 0.3, ScheduleOrientation::AsPrinted);
    CHECK(c.g1 == doctest::Approx(G * std::sqrt(std::tanh(10.0))).epsilon(1e-15));
    CHECK(c.g1 / G > 0.99999);
    CHECK(c.g2 / G == doctest::Approx(std::sqrt(1.0 - std::tanh(10.0))).epsilon(1e-12));
    CHECK(c.g2 / G == doctest::Approx(0.003).epsilon(0.1));
    CHECK(std::abs(c.g1 * c.g1 + c.g2 * c.g2 - G * G) < 1e-14 * G * G);
}

TEST_CASE("schedule: normalization and orientation swap for many t") {
    for (int i = 0; i <= 400; ++i) {
        const double t = 0.05 * i;
        const auto p = coupling_schedule(t, 1.0, 0.245, ScheduleOrientation::AsPrinted);
        const auto r = coupling_schedule(t, 1.0, 0.245, ScheduleOrientation::Reversed);
        CHECK(std::abs(p.g1 * p.g1 + p.g2 * p.g2 - 1.0) < 1e-15);
        CHECK(p.g1 == r.g2);
        CHECK(p.g2 == r.g1);
    }
    CHECK_THROWS_AS(coupling_schedule(-1e-3, 1.0, 0.2, ScheduleOrientation::AsPrinted), Error);
}

TEST_CASE("effective Hamiltonian: zero couplings") {
    CHECK(effective_hamiltonian(0.0, 0.0, ModeSpace({2, 3, 2})).matrix().norm() == 0.0);
}

TEST_CASE("effective Hamiltonian: G1 = 0 single-excitation spectrum") {
    const Eigen::Matrix3d m = single_excitation_block(0.0, 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
    CHECK(std::abs(es.eigenvalues()(1)) < 1e-14);
    CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
    CHECK(std::abs(std::abs(es.eigenvectors()(0, 1)) - 1.0) < 1e-12);
}

TEST_CASE("effective Hamiltonian: Hermitian and excitation conserving") {
    const ModeSpace space({3, 4, 3});
    const auto h = effective_hamiltonian(0.37, 0.81, space);
    CHECK(h.is_hermitian());
    opalg::Operator n = opalg::Operator::zero(space);
    for (int m = 0; m < 3; ++m) n += opalg::embed(opalg::number_operator(space.dim(m)), m, space);
    CHECK(opalg::commutator(h, n).matrix().norm() < 1e-13);
    CHECK_THROWS_AS(effective_hamiltonian(1.0, 1.0, ModeSpace({2, 2})), Error);
}

TEST_CASE("eigenmodes: boundary and symmetric cases") {
    const auto m0 = eigenmodes(0.0, 1.0);
    CHECK((m0.dark - Eigen::Vector3d(-1, 0, 0)).norm() < 1e-15);
    const auto mf = eigenmodes(1.0, 0.0);
    CHECK((mf.dark - Eigen::Vector3d(0, 1, 0)).norm() < 1e-15);
    const double r = 1.0 / std::sqrt(2.0);
    const auto ms = eigenmodes(r, r);
    CHECK((ms.dark - Eigen::Vector3d(-r, r, 0)).norm() < 1e-15);
    CHECK((ms.bright_plus - Eigen::Vector3d(0.5, 0.5, r)).norm() < 1e-15);
    CHECK((ms.bright_minus - Eigen::Vector3d(0.5, 0.5, -r)).norm() < 1e-15);
    CHECK_THROWS_AS(eigenmodes(0.0, 0.0), Error);
}

TEST_CASE("eigenmodes: orthonormal, dark has no spin part and is a zero mode") {
    for (int i = 0; i <= 50; ++i) {
        const auto c = coupling_schedule(0.2 * i, 1.0, 0.245, ScheduleOrientation::AsPrinted);
        if (c.g1 == 0.0 && c.g2 == 0.0) continue;
        const auto m = eigenmodes(c.g1, c.g2);
        CHECK(m.dark(2) == 0.0);
        CHECK(m.dark.norm() == doctest::Approx(1.0));
        CHECK(m.bright_plus.norm() == doctest::Approx(1.0));
        CHECK(std::abs(m.dark.dot(m.bright_plus)) < 1e-15);
        CHECK(std::abs(m.dark.dot(m.bright_minus)) < 1e-15);
        CHECK(std::abs(m.bright_plus.dot(m.bright_minus)) < 1e-15);
        const Eigen::Matrix3d blk = single_excitation_block(c.g1, c.g2);
        CHECK((blk * m.dark).norm() < 1e-14);
        CHECK((blk * m.bright_plus - m.frequencies(1) * m.bright_plus).norm() < 1e-14);
        CHECK((blk * m.bright_minus - m.frequencies(2) * m.bright_minus).norm() < 1e-14);
    }
}

TEST_CASE("thermal occupation: independent Bose-Einstein evaluation") {
    CHECK(thermal_occupation(1.0, 0.0) == 0.0);
    const long double hbar = 1.054571817e-34L, kb = 1.380649e-23L, pi = 3.14159265358979323846264338327950288L;
    const long double x = hbar * 2 * pi * 1.33e9L / (kb * 0.05L);
    const long double expect = 1.0L / (std::exp(x) - 1.0L);
    const double got = thermal_occupation(2 * M_PI * 1.33e9, 0.05);
    CHECK(std::abs(got - static_cast<double>(expect)) <= 1e-6 * static_cast<double>(expect));
    CHECK(got == doctest::Approx(0.387).epsilon(1e-3));

    const double omega = 2 * M_PI * 1e9;
    const double T = 100.0 * 1.054571817e-34 * omega / 1.380649e-23;
    CHECK(thermal_occupation(omega, T) == doctest::Approx(100.0).epsilon(0.01));
    CHECK_THROWS_AS(thermal_occupation(0.0, 0.1), Error);
    CHECK_THROWS_AS(thermal_occupation(1.0, -0.1), Error);
}

TEST_CASE("snr fidelity") {
    CHECK(snr_fidelity(0.5, 0.0).value == 1.0);
    CHECK(snr_fidelity(0.3, 0.3).value == doctest::Approx(0.5));
    CHECK(snr_fidelity(0.859, 0.231).value == doctest::Approx(0.788).epsilon(1e-3));
    const auto z = snr_fidelity(0.0, 0.2);
    CHECK(z.value == 0.0);
    CHECK(z.signal_zero);
    try {
        snr_fidelity(0.0, 0.0);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UndefinedFidelity);
    }
    CHECK_THROWS_AS(snr_fidelity(-0.1, 0.1), Error);
}

TEST_CASE("params: validation and defaults") {
    ProtocolParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.t_final() == doctest::Approx(1.0 / 0.245));
    CHECK(p.step() == doctest::Approx(1.0 / 400));
    p.alpha = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = ProtocolParams{};
    p.kappa1 = -0.1;
    CHECK_THROWS_AS(p.validate(), Error);
    p = ProtocolParams{};
    p.dims.microwave = 1;
    CHECK_THROWS_AS(p.validate(), Error);
    CHECK(parse_orientation(to_string(ScheduleOrientation::Reversed)) == ScheduleOrientation::Reversed);
    CHECK(parse_direction("optical_to_mw") == Direction::OpticalToMicrowave);
    CHECK(parse_signal_input("photon_on_thermal") == SignalInput::PhotonOnThermal);
    CHECK_THROWS_AS(parse_direction("sideways"), Error);
}

TEST_CASE("run_transfer: calibrated reference point") {
    const auto rec = calibrate_orientation(reference_params());
    CHECK(rec.chosen == ScheduleOrientation::Reversed);
    CHECK(rec.efficiency_as_printed < 0.8);
    ProtocolParams p = reference_params();
    p.orientation = rec.chosen;
    const auto r = run_transfer(p);
    CHECK(r.efficiency == doctest::Approx(0.859).epsilon(0.02 / 0.859));
    CHECK(r.fidelity_snr == doctest::Approx(0.788).epsilon(0.02 / 0.788));
    CHECK(r.fidelity_snr == doctest::Approx(1.0 / (1.0 + r.noise / r.efficiency)));
    CHECK(r.max_trace_deviation < 1e-6);
}

TEST_CASE("run_transfer: zero temperature gives no noise") {
    ProtocolParams p = reference_params();
    p.orientation = ScheduleOrientation::Reversed;
    p.temperature_K = 0.0;
    const auto r = run_transfer(p);
    CHECK(r.noise == 0.0);
    CHECK(r.fidelity_snr == 1.0);
}

TEST_CASE("run_transfer: lossless run matches one-excitation amplitudes") {
    ProtocolParams p = lossless();
    for (const double alpha : {0.05, 0.245, 1.0}) {
        p.alpha = alpha;
        p.time_ratio = 2.0;
        const auto r = run_transfer(p, {0, false});
        CHECK(r.efficiency == doctest::Approx(oracles::single_excitation_efficiency(alpha, 2.0)).epsilon(1e-4));
        CHECK(r.efficiency < 1.0);
    }
}

TEST_CASE("run_transfer: excitation conserved without loss") {
    ProtocolParams p = lossless();
    const auto r = run_transfer(p, {10, false});
    const auto& s = r.signal_trace;
    REQUIRE(s.time.size() > 10);
    for (std::size_t i = 0; i < s.time.size(); ++i) {
        CHECK(std::abs(s.optical[i] + s.microwave[i] + s.spin[i] - 1.0) < 1e-6);
    }
}

TEST_CASE("run_transfer: optical to microwave uses the printed orientation") {
    ProtocolParams p = reference_params();
    p.direction = Direction::OpticalToMicrowave;
    const auto rec = calibrate_orientation(p);
    CHECK(rec.chosen == ScheduleOrientation::AsPrinted);
    CHECK(rec.efficiency_as_printed > 0.8);
}

TEST_CASE("run_transfer: dephasing robustness") {
    ProtocolParams p = reference_params();
    p.orientation = ScheduleOrientation::Reversed;
    const double base = run_transfer(p, {0, false}).efficiency;
    p.gamma_star = 0.1;
    const double deph = run_transfer(p, {0, false}).efficiency;
    CHECK(deph >= 0.9 * base);
}

TEST_CASE("run_transfer: noise rises and fidelity falls with temperature") {
    ProtocolParams p = reference_params();
    p.orientation = ScheduleOrientation::Reversed;
    double last_noise = -1.0, last_f = 2.0;
    for (double mK : {10.0, 50.0, 100.0, 200.0, 300.0}) {
        p.temperature_K = mK * 1e-3;
        const auto r = run_transfer(p);
        CHECK(r.noise >= last_noise);
        CHECK(r.fidelity_snr <= last_f);
        last_noise = r.noise;
        last_f = r.fidelity_snr;
    }
}

}
