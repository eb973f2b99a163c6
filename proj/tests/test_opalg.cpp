#include "ertrans/error.hpp"
#include "ertrans/opalg.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ertrans;
using namespace ertrans::opalg;

namespace {

Matrix random_hermitian(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(N(rng), N(rng));
    return 0.5 * (m + m.adjoint());
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

TEST_SUITE("opalg") {

TEST_CASE("annihilation: dim 2 is the lowering matrix") {
    const Operator a = annihilation(2);
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 1) = 1.0;
    CHECK((a.matrix() - expect).norm() == 0.0);
}

TEST_CASE("annihilation: number operator diagonal for every dim") {
    const Operator a = annihilation(4);
    const Matrix n = (a.adjoint() * a).matrix();
    for (int k = 0; k < 4; ++k) CHECK(n(k, k).real() == doctest::Approx(k));
    CHECK((n - Matrix(n.diagonal().asDiagonal())).norm() < 1e-15);
    for (int dim = 2; dim <= 12; ++dim) {
        const Matrix m = (annihilation(dim).adjoint() * annihilation(dim)).matrix();
        CHECK((m - number_operator(dim).matrix()).norm() < 1e-12);
    }
}

TEST_CASE("annihilation: [a, a^+] is identity except the top Fock level") {
    const Operator a = annihilation(10);
    const Matrix c = commutator(a, a.adjoint()).matrix();
    Matrix expect = Matrix::Identity(10, 10);
    expect(9, 9) = -9.0;
    CHECK((c - expect).norm() < 1e-12);
}

TEST_CASE("annihilation: dim < 2 rejected") {
    CHECK(throws_kind(ErrorKind::InvalidDimension, [] { annihilation(1); }));
    CHECK(throws_kind(ErrorKind::InvalidDimension, [] { ModeSpace({3, 1}); }));
}

TEST_CASE("embed: factorizes in mode order") {
    const ModeSpace space({2, 2});
    const Operator a = annihilation(2);
    const Operator e = embed(a, 0, space);
    CHECK((e.matrix() - kron(a.matrix(), Matrix::Identity(2, 2))).norm() == 0.0);
    const Operator e1 = embed(a, 1, space);
    CHECK((e1.matrix() - kron(Matrix::Identity(2, 2), a.matrix())).norm() == 0.0);
}

TEST_CASE("embed: distinct modes commute") {
    const ModeSpace space({3, 4});
    const Operator a1 = embed(annihilation(3), 0, space);
    const Operator a2 = embed(annihilation(4), 1, space);
    CHECK(commutator(a1, a2.adjoint()).matrix().norm() < 1e-14);
    CHECK(commutator(a1, a2).matrix().norm() < 1e-14);
}

TEST_CASE("embed: Kronecker spectrum multiplicities") {
    const ModeSpace space({5, 5, 5});
    const Operator n = embed(number_operator(5), 2, space);
    const auto es = hermitian_eigensolve(n);
    REQUIRE(es.values.size() == 125);
    for (int v = 0; v < 5; ++v) {
        int count = 0;
        for (Eigen::Index k = 0; k < es.values.size(); ++k) count += std::abs(es.values(k) - v) < 1e-9;
        CHECK(count == 25);
    }
}

TEST_CASE("embed: shape mismatch rejected") {
    const ModeSpace space({3, 4});
    CHECK(throws_kind(ErrorKind::InvalidDimension, [&] { embed(annihilation(4), 0, space); }));
    CHECK(throws_kind(ErrorKind::InvalidDimension, [&] { embed(annihilation(3), 2, space); }));
}

TEST_CASE("thermal_state: zero occupation is vacuum") {
    const DensityMatrix rho = thermal_state(4, 0.0);
    CHECK(std::abs(rho.matrix()(0, 0) - 1.0) < 1e-15);
    CHECK(rho.matrix().norm() == doctest::Approx(1.0));
}

TEST_CASE("thermal_state: geometric law before renormalization") {
    const double nbar = 0.387;
    const DensityMatrix rho = thermal_state(5, nbar);
    double z = 0.0;
    for (int n = 0; n < 5; ++n) z += std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1);
    for (int n = 0; n < 5; ++n) {
        const double p = std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1);
        CHECK(rho.matrix()(n, n).real() * z == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(rho.matrix()(0, 0).real() * z == doctest::Approx(0.7215).epsilon(1e-3));
    CHECK(rho.matrix()(1, 1).real() * z == doctest::Approx(0.2014).epsilon(2e-3));
}

TEST_CASE("thermal_state: normalized, nonnegative, mean below nbar and rising with dim") {
    double last = -1.0;
    for (int dim = 2; dim <= 30; ++dim) {
        const DensityMatrix rho = thermal_state(dim, 1.3);
        CHECK(rho.op().trace().real() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(rho.matrix().diagonal().real().minCoeff() >= 0.0);
        const double mean = expectation(rho, number_operator(dim)).real();
        CHECK(mean <= 1.3 + 1e-12);
        CHECK(mean >= last - 1e-14);
        last = mean;
    }
    CHECK(last == doctest::Approx(1.3).epsilon(1e-2));
    CHECK(throws_kind(ErrorKind::InvalidParameter, [] { thermal_state(3, -0.1); }));
}

TEST_CASE("expectation: Fock, thermal and identity") {
    CHECK(expectation(fock_state(4, 1), number_operator(4)).real() == doctest::Approx(1.0));
    const double mean = expectation(thermal_state(20, 0.5), number_operator(20)).real();
    CHECK(std::abs(mean - 0.5) < 1e-4);
    const ModeSpace space({3, 2});
    const DensityMatrix rho = product_state({thermal_state(3, 0.7), fock_state(2, 1)});
    CHECK(std::abs(expectation(rho, Operator::identity(space)) - 1.0) < 1e-14);
    const Operator h(space, random_hermitian(6, 3));
    CHECK(std::abs(expectation(rho, h).imag()) < 1e-10);
    CHECK(throws_kind(ErrorKind::InvalidDimension, [&] { expectation(rho, number_operator(6)); }));
}

TEST_CASE("density matrix validation") {
    const ModeSpace s = ModeSpace::single(2);
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 0.5;
    CHECK_THROWS_AS(DensityMatrix(Operator(s, m)), Error);
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix(Operator(s, m)), Error);
}

TEST_CASE("hermitian_eigensolve: worked examples") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 3;
    d(1, 1) = 1;
    d(2, 2) = 2;
    const auto es = hermitian_eigensolve(d);
    CHECK(es.values(0) == doctest::Approx(1));
    CHECK(es.values(1) == doctest::Approx(2));
    CHECK(es.values(2) == doctest::Approx(3));

    Matrix x = Matrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    const auto ex = hermitian_eigensolve(x);
    CHECK(ex.values(0) == doctest::Approx(-1));
    CHECK(ex.values(1) == doctest::Approx(1));
}

TEST_CASE("hermitian_eigensolve: random 16x16 residual, orthonormality, trace, reconstruction") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const Matrix h = random_hermitian(16, seed);
        const auto es = hermitian_eigensolve(h);
        const double norm = h.norm();
        for (int k = 0; k < 16; ++k) {
            CHECK((h * es.vectors.col(k) - es.values(k) * es.vectors.col(k)).norm() < 1e-9 * norm);
            if (k > 0) CHECK(es.values(k) >= es.values(k - 1));
        }
        CHECK((es.vectors.adjoint() * es.vectors - Matrix::Identity(16, 16)).norm() < 1e-10);
        CHECK(std::abs(es.values.sum() - h.trace().real()) < 1e-9 * norm);
        const Matrix rebuilt = es.vectors * es.values.cast<cplx>().asDiagonal() * es.vectors.adjoint();
        CHECK((rebuilt - h).norm() < 1e-8 * norm);
    }
}

TEST_CASE("hermitian_eigensolve: non-Hermitian input rejected") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK(throws_kind(ErrorKind::InvalidOperator, [&] { hermitian_eigensolve(m); }));
}

TEST_CASE("embedding preserves spectra up to multiplicity") {
    const ModeSpace space({3, 4});
    const Operator h(ModeSpace::single(4), random_hermitian(4, 11));
    const auto single = hermitian_eigensolve(h);
    const auto full = hermitian_eigensolve(embed(h, 1, space));
    for (int k = 0; k < 4; ++k) {
        for (int r = 0; r < 3; ++r) CHECK(full.values(3 * k + r) == doctest::Approx(single.values(k)).epsilon(1e-10));
    }
}

}
