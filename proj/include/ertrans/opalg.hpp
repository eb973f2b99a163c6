#pragma once

// Dense operator algebra on truncated bosonic Fock spaces.
//
// A ModeSpace is an ordered list of per-mode truncation dimensions; the
// composite basis is the Kronecker product in that order (mode 0 is the
// most significant index). Operators are dense complex matrices tied to
// the space they act on. Every value here is immutable once built.

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace ertrans::opalg {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

class ModeSpace {
public:
    explicit ModeSpace(std::vector<int> dims);

    static ModeSpace single(int dim) { return ModeSpace({dim}); }

    const std::vector<int>& dims() const noexcept { return dims_; }
    int mode_count() const noexcept { return static_cast<int>(dims_.size()); }
    int dim(int mode) const;
    Eigen::Index total_dim() const noexcept { return total_; }

    bool operator==(const ModeSpace& other) const noexcept { return dims_ == other.dims_; }

private:
    std::vector<int> dims_;
    Eigen::Index total_ = 1;
};

class Operator {
public:
    Operator(ModeSpace space, Matrix entries);

    static Operator zero(const ModeSpace& space);
    static Operator identity(const ModeSpace& space);

    const ModeSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

    Operator adjoint() const;
    cplx trace() const { return m_.trace(); }

    // max |M - M^dagger|
    double hermiticity_error() const;
    // max |M - M^dagger| < rel_tol * max |M| (the zero operator is Hermitian)
    bool is_hermitian(double rel_tol = 1e-12) const;

    Operator& operator+=(const Operator& rhs);
    Operator& operator-=(const Operator& rhs);
    Operator& operator*=(cplx s);

    friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
    friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
    friend Operator operator*(Operator lhs, cplx s) { return lhs *= s; }
    friend Operator operator*(cplx s, Operator rhs) { return rhs *= s; }
    friend Operator operator*(double s, Operator rhs) { return rhs *= cplx(s, 0.0); }
    friend Operator operator*(const Operator& lhs, const Operator& rhs);

private:
    ModeSpace space_;
    Matrix m_;
};

Operator commutator(const Operator& a, const Operator& b);

// Acceptance window for something to be treated as a physical state.
struct StateTolerance {
    double trace = 1e-9;
    double hermitian = 1e-12;
    double min_eigenvalue = -1e-9;
};

class DensityMatrix {
public:
    explicit DensityMatrix(Operator rho, const StateTolerance& tol = {});

    const Operator& op() const noexcept { return rho_; }
    const Matrix& matrix() const noexcept { return rho_.matrix(); }
    const ModeSpace& space() const noexcept { return rho_.space(); }

    double purity() const;
    double min_eigenvalue() const;

private:
    Operator rho_;
};

Matrix kron(const Matrix& a, const Matrix& b);

// Bosonic lowering operator on a dim-level truncation: M[n-1, n] = sqrt(n).
Operator annihilation(int dim);
Operator number_operator(int dim);

// identity (x) ... (x) op (x) ... (x) identity, op sitting at mode_index.
Operator embed(const Operator& op, int mode_index, const ModeSpace& space);

// Geometric (Bose-Einstein) occupation law, renormalized over the truncation.
DensityMatrix thermal_state(int dim, double nbar);
DensityMatrix fock_state(int dim, int n);
// Tensor product of single-mode states, in mode order.
DensityMatrix product_state(const std::vector<DensityMatrix>& factors);

cplx expectation(const DensityMatrix& rho, const Operator& op);

struct Eigensystem {
    Eigen::VectorXd values;  // ascending
    Matrix vectors;          // orthonormal columns
};

Eigensystem hermitian_eigensolve(const Operator& op);
Eigensystem hermitian_eigensolve(const Matrix& m);

}  // namespace ertrans::opalg
