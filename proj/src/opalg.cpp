#include "ertrans/opalg.hpp"

#include "ertrans/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ertrans::opalg {

namespace {

void require_same_space(const Operator& a, const Operator& b, const char* where) {
    if (!(a.space() == b.space())) {
        throw Error(ErrorKind::InvalidDimension, std::string(where) + ": operator spaces differ");
    }
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

ModeSpace::ModeSpace(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
        throw Error(ErrorKind::InvalidDimension, "mode space needs at least one mode");
    }
    for (int d : dims_) {
        if (d < 2) {
            throw Error(ErrorKind::InvalidDimension,
                        "mode truncation must be >= 2, got " + std::to_string(d));
        }
        total_ *= d;
    }
}

int ModeSpace::dim(int mode) const {
    if (mode < 0 || mode >= mode_count()) {
        throw Error(ErrorKind::InvalidDimension, "mode index " + std::to_string(mode) + " out of range");
    }
    return dims_[static_cast<std::size_t>(mode)];
}

Operator::Operator(ModeSpace space, Matrix entries) : space_(std::move(space)), m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() != space_.total_dim()) {
        throw Error(ErrorKind::InvalidDimension,
                    "operator shape " + std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()) +
                        " does not match space dimension " + std::to_string(space_.total_dim()));
    }
}

Operator Operator::zero(const ModeSpace& space) {
    return Operator(space, Matrix::Zero(space.total_dim(), space.total_dim()));
}

Operator Operator::identity(const ModeSpace& space) {
    return Operator(space, Matrix::Identity(space.total_dim(), space.total_dim()));
}

Operator Operator::adjoint() const { return Operator(space_, m_.adjoint()); }

double Operator::hermiticity_error() const { return max_abs(m_ - m_.adjoint()); }

bool Operator::is_hermitian(double rel_tol) const {
    const double scale = max_abs(m_);
    if (scale == 0.0) return true;
    return hermiticity_error() < rel_tol * scale;
}

Operator& Operator::operator+=(const Operator& rhs) {
    require_same_space(*this, rhs, "operator+");
    m_ += rhs.m_;
    return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
    require_same_space(*this, rhs, "operator-");
    m_ -= rhs.m_;
    return *this;
}

Operator& Operator::operator*=(cplx s) {
    m_ *= s;
    return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
    require_same_space(lhs, rhs, "operator*");
    return Operator(lhs.space(), lhs.matrix() * rhs.matrix());
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

DensityMatrix::DensityMatrix(Operator rho, const StateTolerance& tol) : rho_(std::move(rho)) {
    const double trace_dev = std::abs(rho_.trace() - cplx(1.0, 0.0));
    if (!(trace_dev <= tol.trace)) {
        throw Error(ErrorKind::InvalidOperator,
                    "density matrix trace deviates from 1 by " + std::to_string(trace_dev));
    }
    const double herm = rho_.hermiticity_error();
    if (!(herm <= tol.hermitian)) {
        throw Error(ErrorKind::InvalidOperator,
                    "density matrix is not Hermitian (max deviation " + std::to_string(herm) + ")");
    }
    const double lo = min_eigenvalue();
    if (lo < tol.min_eigenvalue) {
        throw Error(ErrorKind::InvalidOperator,
                    "density matrix has negative eigenvalue " + std::to_string(lo));
    }
}

double DensityMatrix::purity() const { return (matrix() * matrix()).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
    const Matrix h = 0.5 * (matrix() + matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Operator annihilation(int dim) {
    if (dim < 2) {
        throw Error(ErrorKind::InvalidDimension, "annihilation operator needs dim >= 2, got " + std::to_string(dim));
    }
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        m(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return Operator(ModeSpace::single(dim), std::move(m));
}

Operator number_operator(int dim) {
    const Operator a = annihilation(dim);
    return a.adjoint() * a;
}

Operator embed(const Operator& op, int mode_index, const ModeSpace& space) {
    if (op.space().mode_count() != 1) {
        throw Error(ErrorKind::InvalidDimension, "embed expects a single-mode operator");
    }
    if (op.dim() != space.dim(mode_index)) {
        throw Error(ErrorKind::InvalidDimension,
                    "operator dimension " + std::to_string(op.dim()) + " does not match mode " +
                        std::to_string(mode_index) + " truncation " + std::to_string(space.dim(mode_index)));
    }
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < space.mode_count(); ++k) {
        const Matrix factor = (k == mode_index) ? op.matrix() : Matrix::Identity(space.dim(k), space.dim(k));
        out = kron(out, factor);
    }
    return Operator(space, std::move(out));
}

DensityMatrix thermal_state(int dim, double nbar) {
    if (dim < 2) {
        throw Error(ErrorKind::InvalidDimension, "thermal state needs dim >= 2");
    }
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
        throw Error(ErrorKind::InvalidParameter, "mean occupation must be finite and >= 0, got " + std::to_string(nbar));
    }
    const double ratio = nbar / (1.0 + nbar);
    Eigen::VectorXd p(dim);
    double weight = 1.0;
    for (int n = 0; n < dim; ++n) {
        p(n) = weight;
        weight *= ratio;
    }
    p /= p.sum();
    Matrix m = Matrix::Zero(dim, dim);
    m.diagonal() = p.cast<cplx>();
    return DensityMatrix(Operator(ModeSpace::single(dim), std::move(m)));
}

DensityMatrix fock_state(int dim, int n) {
    if (n < 0 || n >= dim) {
        throw Error(ErrorKind::InvalidDimension,
                    "Fock level " + std::to_string(n) + " outside truncation " + std::to_string(dim));
    }
    Matrix m = Matrix::Zero(dim, dim);
    m(n, n) = 1.0;
    return DensityMatrix(Operator(ModeSpace::single(dim), std::move(m)));
}

DensityMatrix product_state(const std::vector<DensityMatrix>& factors) {
    if (factors.empty()) {
        throw Error(ErrorKind::InvalidDimension, "product state needs at least one factor");
    }
    std::vector<int> dims;
    Matrix m = Matrix::Identity(1, 1);
    for (const auto& f : factors) {
        for (int d : f.space().dims()) dims.push_back(d);
        m = kron(m, f.matrix());
    }
    return DensityMatrix(Operator(ModeSpace(std::move(dims)), std::move(m)));
}

cplx expectation(const DensityMatrix& rho, const Operator& op) {
    if (!(rho.space() == op.space())) {
        throw Error(ErrorKind::InvalidDimension, "expectation: state and operator spaces differ");
    }
    // Tr[rho A] without forming the product.
    return (rho.matrix().transpose().cwiseProduct(op.matrix())).sum();
}

Eigensystem hermitian_eigensolve(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorKind::InvalidDimension, "eigensolve needs a non-empty square matrix");
    }
    const double scale = max_abs(m);
    const double herm = max_abs(m - m.adjoint());
    if (scale > 0.0 && herm >= 1e-12 * scale) {
        throw Error(ErrorKind::InvalidOperator,
                    "matrix is not Hermitian (relative deviation " + std::to_string(herm / scale) + ")");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::InvalidOperator, "Hermitian eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigensystem hermitian_eigensolve(const Operator& op) { return hermitian_eigensolve(op.matrix()); }

}  // namespace ertrans::opalg
