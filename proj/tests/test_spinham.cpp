#include "ertrans/error.hpp"
#include "ertrans/spinham.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace ertrans;
using namespace ertrans::spin;
using opalg::cplx;

namespace {

SpinParams literature() { return load_spin_params(ERTRANS_TEST_DATA "/er167_yso_site1.params"); }

SpinParams electron_only(double g) {
    SpinParams p;
    p.g = g * Eigen::Matrix3d::Identity();
    return p;
}

bool throws_kind(ErrorKind kind, auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

}  // namespace

TEST_SUITE("spinham") {

TEST_CASE("spin matrices: spin 1/2 are half the Pauli matrices") {
    const auto s = spin_matrices(0.5);
    Eigen::Matrix2cd x, y, z;
    x << 0, 1, 1, 0;
    y << 0, cplx(0, -1), cplx(0, 1), 0;
    z << 1, 0, 0, -1;
    CHECK((s[0].matrix() - 0.5 * x).norm() < 1e-15);
    CHECK((s[1].matrix() - 0.5 * y).norm() < 1e-15);
    CHECK((s[2].matrix() - 0.5 * z).norm() < 1e-15);
}

TEST_CASE("spin matrices: Casimir, diagonal Jz and commutators") {
    const auto s = spin_matrices(3.5);
    for (int k = 0; k < 8; ++k) CHECK(s[2].matrix()(k, k).real() == doctest::Approx(3.5 - k));
    const opalg::Matrix c2 = s[0].matrix() * s[0].matrix() + s[1].matrix() * s[1].matrix() + s[2].matrix() * s[2].matrix();
    CHECK((c2 - 15.75 * opalg::Matrix::Identity(8, 8)).norm() < 1e-12);
    for (double j : {0.5, 1.0, 1.5, 2.0, 3.5, 4.5}) {
        const auto m = spin_matrices(j);
        const cplx i(0, 1);
        CHECK((opalg::commutator(m[0], m[1]).matrix() - i * m[2].matrix()).norm() < 1e-12);
        CHECK((opalg::commutator(m[1], m[2]).matrix() - i * m[0].matrix()).norm() < 1e-12);
        CHECK((opalg::commutator(m[2], m[0]).matrix() - i * m[1].matrix()).norm() < 1e-12);
        for (const auto& op : m) CHECK(op.is_hermitian());
    }
    CHECK(throws_kind(ErrorKind::InvalidParameter, [] { spin_matrices(0.3); }));
    CHECK(throws_kind(ErrorKind::InvalidParameter, [] { spin_matrices(0.0); }));
}

TEST_CASE("hamiltonian: all interactions off") {
    SpinParams p;
    CHECK(build_hamiltonian(p, Eigen::Vector3d::Zero()).matrix().norm() == 0.0);
}

TEST_CASE("hamiltonian: isotropic Zeeman ladder") {
    SpinParams p = electron_only(2.0);
    p.g_n = -0.1618;
    const double B = 0.3;
    const auto levels = energy_levels(p, B * Eigen::Vector3d::UnitZ());
    std::vector<double> expect;
    for (double ms : {0.5, -0.5})
        for (int k = 0; k < 8; ++k) {
            const double mi = 3.5 - k;
            expect.push_back(13.996245 * 2.0 * B * ms - 7.622593e-3 * p.g_n * B * mi);
        }
    std::sort(expect.begin(), expect.end());
    for (int k = 0; k < 16; ++k) CHECK(levels.frequency_GHz(k) == doctest::Approx(expect[k]).epsilon(1e-12));
}

TEST_CASE("hamiltonian: affine in B, Hermitian, trace identity") {
    const SpinParams p = literature();
    const Eigen::Vector3d B(0.012, -0.031, 0.02);
    const opalg::Matrix h0 = build_hamiltonian(p, Eigen::Vector3d::Zero()).matrix();
    const opalg::Matrix h1 = build_hamiltonian(p, B).matrix();
    const opalg::Matrix h2 = build_hamiltonian(p, 2 * B).matrix();
    CHECK((h2 - h0 - 2.0 * (h1 - h0)).norm() < 1e-12 * h1.norm());
    const auto z = zeeman_operators(p);
    CHECK((h1 - h0 - (B(0) * z[0] + B(1) * z[1] + B(2) * z[2])).norm() < 1e-12 * h1.norm());
    for (double scale : {0.0, 0.05, 0.5}) {
        const auto h = build_hamiltonian(p, scale * Eigen::Vector3d(0.3, 0.5, 0.8));
        CHECK((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-12 * h.matrix().cwiseAbs().maxCoeff());
        const auto l = energy_levels(p, scale * Eigen::Vector3d(0.3, 0.5, 0.8));
        CHECK(l.count() == 16);
        CHECK(std::abs(l.frequency_GHz.sum() - h.trace().real()) <= 1e-9 * l.frequency_GHz.cwiseAbs().sum());
        for (int k = 1; k < 16; ++k) CHECK(l.frequency_GHz(k) >= l.frequency_GHz(k - 1));
    }
}

TEST_CASE("dipole: symmetric in the pair, phase invariant, static moment rejected") {
    const SpinParams p = literature();
    const Eigen::Vector3d B(0.0, 0.0, 0.05);
    const auto d1 = transition_dipole(p, B, 3, 9);
    const auto d2 = transition_dipole(p, B, 9, 3);
    CHECK((d1 - d2).norm() < 1e-12);
    const auto l = energy_levels(p, B);
    const auto z = zeeman_operators(p);
    const cplx ph = std::polar(1.0, 0.7);
    for (int i = 0; i < 3; ++i) {
        const cplx raw = (ph * l.vectors.col(2)).dot(z[i] * (std::conj(ph) * l.vectors.col(8)));
        CHECK(std::abs(raw) == doctest::Approx(d1(i)).epsilon(1e-9));
    }
    CHECK(throws_kind(ErrorKind::InvalidPair, [&] { transition_dipole(p, B, 4, 4); }));
    CHECK(throws_kind(ErrorKind::InvalidPair, [&] { transition_dipole(p, B, 0, 4); }));
}

TEST_CASE("sensitivity: finite-difference oracle on 20+ transitions") {
    const auto rep = oracles::derivative_oracle(literature(), 10, 3, 2024);
    CHECK(rep.transitions >= 20);
    CHECK(rep.worst_gradient < 0.01);
    CHECK(rep.worst_curvature < 0.01);
}

TEST_CASE("sensitivity: curvature is symmetric") {
    const SpinParams p = literature();
    const auto s = zeeman_sensitivity(p, Eigen::Vector3d(0.01, 0.02, -0.01), 2, 11);
    CHECK((s.C_Hz_per_T2 - s.C_Hz_per_T2.transpose()).norm() < 1e-8 * s.C_Hz_per_T2.norm());
}

TEST_CASE("sensitivity: isotropic electron toy model") {
    const double g = 2.0;
    const SpinParams p = electron_only(g);
    const Eigen::Vector3d B(0.0, 0.03, 0.04);
    const auto s = zeeman_sensitivity(p, B, 1, 9);
    CHECK(s.nu_Hz_per_T.norm() == doctest::Approx(13.996245e9 * g).epsilon(1e-12));
    const Eigen::Vector3d u = B.normalized();
    CHECK(std::abs(u.dot(s.C_Hz_per_T2 * u)) < 1e-6 * s.C_Hz_per_T2.norm());
    // Transverse curvature of beta g |B|.
    const Eigen::Vector3d perp = Eigen::Vector3d::UnitX();
    CHECK(perp.dot(s.C_Hz_per_T2 * perp) == doctest::Approx(13.996245e9 * g / B.norm()).epsilon(1e-9));
    CHECK(throws_kind(ErrorKind::DegenerateTransition, [&] { zeeman_sensitivity(p, B, 1, 2); }));
}

TEST_CASE("coherence time") {
    const CoherenceModel m{26e-6};
    CHECK(std::isinf(coherence_time(Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero(), m)));
    const Eigen::Vector3d nu(3e6, 0, 4e6);
    const double t1 = coherence_time(nu, Eigen::Matrix3d::Zero(), m);
    CHECK(t1 == doctest::Approx(1.0 / (M_PI * 5e6 * 26e-6)));
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    C(0, 0) = 4e12;
    C(1, 1) = -8e12;
    const double t2 = coherence_time(Eigen::Vector3d::Zero(), C, m);
    CHECK(t2 == doctest::Approx(1.0 / (M_PI * 4e12 * 26e-6 * 26e-6)));
    CHECK_THROWS_AS(coherence_time(nu, C, CoherenceModel{0.0}), Error);
    CHECK_THROWS_AS(coherence_time(nu, C, CoherenceModel{-1e-6}), Error);
}

TEST_CASE("rank transitions: sorted, windowed, empty window") {
    const SpinParams p = literature();
    const auto r = rank_transitions(p, Eigen::Vector3d::Zero(), {1.0, 3.0});
    REQUIRE(!r.empty());
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(r[i].frequency_GHz >= 1.0);
        CHECK(r[i].frequency_GHz <= 3.0);
        CHECK(r[i].lower < r[i].upper);
        CHECK(r[i].T2_s > 0.0);
        if (i) CHECK(r[i].T2_s <= r[i - 1].T2_s);
    }
    CHECK(rank_transitions(p, Eigen::Vector3d::Zero(), {100.0, 101.0}).empty());
    CHECK_THROWS_AS(rank_transitions(p, Eigen::Vector3d::Zero(), {3.0, 1.0}), Error);
}

TEST_CASE("field sweep: zero-field column, continuity, serial/parallel agreement") {
    const SpinParams p = literature();
    const Eigen::Vector3d axis = axis_from_name("b");
    const auto sw = field_sweep(p, axis, 0.2, 201, 1);
    const auto l0 = energy_levels(p, Eigen::Vector3d::Zero());
    CHECK((sw.levels_GHz.front() - l0.frequency_GHz).norm() == 0.0);
    const auto zu = [&] {
        const auto z = zeeman_operators(p);
        return opalg::Matrix(axis(0) * z[0] + axis(1) * z[1] + axis(2) * z[2]);
    }();
    const double dB = sw.field_T[1] - sw.field_T[0];
    const auto slope = [&](std::size_t s, double f) {
        const auto l = energy_levels(p, sw.field_T[s] * axis);
        int j = 0;
        for (int k = 1; k < l.count(); ++k)
            if (std::abs(l.frequency_GHz(k) - f) < std::abs(l.frequency_GHz(j) - f)) j = k;
        return std::abs(l.vectors.col(j).dot(zu * l.vectors.col(j)).real());
    };
    int violations = 0;
    for (std::size_t s = 1; s < sw.field_T.size(); ++s) {
        for (int k = 0; k < 16; ++k) {
            const double jump = std::abs(sw.levels_GHz[s](k) - sw.levels_GHz[s - 1](k));
            const double bound = 10.0 * std::max(slope(s - 1, sw.levels_GHz[s - 1](k)), slope(s, sw.levels_GHz[s](k))) * dB;
            if (jump > bound + 1e-6) ++violations;
        }
    }
    CHECK(violations == 0);
    const auto par = field_sweep(p, axis, 0.2, 201, 3);
    for (std::size_t s = 0; s < sw.field_T.size(); ++s) CHECK((par.levels_GHz[s] - sw.levels_GHz[s]).norm() == 0.0);
    CHECK_THROWS_AS(field_sweep(p, axis, 0.2, 1), Error);
}

TEST_CASE("field sweep: high-field manifolds split by the electronic Zeeman energy") {
    const SpinParams p = literature();
    const Eigen::Vector3d b = axis_from_name("b");
    const double B = 2.0;
    const auto sw = field_sweep(p, b, B, 2);
    Eigen::VectorXd last = sw.levels_GHz.back();
    std::sort(last.data(), last.data() + last.size());
    const double split = last.tail(8).mean() - last.head(8).mean();
    const double expect = 13.996245 * (p.g * b).norm() * B;
    CHECK(split == doctest::Approx(expect).epsilon(0.02));
    CHECK(last(8) - last(7) > 10 * (last(7) - last(0)));
}

TEST_CASE("zefoz: electron-only model has none") {
    const SpinParams p = electron_only(2.0);
    CHECK(find_zefoz(p, {Eigen::Vector3d(0, 0, 0.01), Eigen::Vector3d::Zero()}, 1e7).empty());
    CHECK_THROWS_AS(find_zefoz(p, {Eigen::Vector3d::Zero()}, 0.0), Error);
}

TEST_CASE("zefoz: hits have small gradients and consistent T2") {
    const SpinParams p = literature();
    const auto z = find_zefoz(p, {Eigen::Vector3d::Zero()}, 1e7);
    for (const auto& hit : z) {
        CHECK(hit.S1_Hz_per_T < 1e7);
        CHECK(hit.T2_s > 0.0);
        CHECK(hit.frequency_GHz > 0.0);
    }
}

TEST_CASE("parameter file: shipped data loads, errors name the key") {
    const SpinParams p = literature();
    CHECK(p.dim() == 16);
    CHECK(p.I == 3.5);
    CHECK(!p.source.empty());
    CHECK(p.constants.beta_e_GHz_per_T == 13.996245);

    const std::string base = "S = 0.5\nI = 3.5\ng_n = -0.16\ng = 1 0 0 0 1 0 0 0 1\nQ_MHz = 0 0 0 0 0 0 0 0 0\n";
    try {
        parse_spin_params(base + "A_MHz = 1 2 3 2 1 0 3 0 1\ncolour = red\n", "t");
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        CHECK(std::string(e.what()).find("colour") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_spin_params(base, "t"), Error);
    CHECK_THROWS_AS(parse_spin_params(base + "A_MHz = 1 2 3\n", "t"), Error);

    std::vector<std::string> warnings;
    const auto q = parse_spin_params(base + "A_MHz = 100 2 0 0 100 0 0 0 100\n", "t", &warnings);
    CHECK(warnings.size() == 1);
    CHECK(q.A_MHz(0, 1) == doctest::Approx(1.0));
    CHECK(q.A_MHz(1, 0) == doctest::Approx(1.0));
    warnings.clear();
    parse_spin_params(base + "A_MHz = 100 1.0000001 0 1 100 0 0 0 100\n", "t", &warnings);
    CHECK(warnings.empty());
}

TEST_CASE("axis names") {
    CHECK(axis_from_name("D1") == Eigen::Vector3d::UnitX());
    CHECK(axis_from_name("D2") == Eigen::Vector3d::UnitY());
    CHECK(axis_from_name("b") == Eigen::Vector3d::UnitZ());
    CHECK_THROWS_AS(axis_from_name("c"), Error);
}

}
