#include "ertrans/lindblad.hpp"

#include "ertrans/error.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <sstream>

namespace ertrans::lindblad {

using opalg::cplx;
using opalg::Matrix;

Dissipator::Dissipator(Operator jump, double rate) : jump_(std::move(jump)), rate_(rate) {
    if (!(rate_ >= 0.0) || !std::isfinite(rate_)) {
        throw Error(ErrorKind::InvalidParameter, "dissipator rate must be finite and >= 0");
    }
}

TimeDependentHamiltonian TimeDependentHamiltonian::constant(Operator h) {
    TimeDependentHamiltonian out(h.space());
    out.add_term(std::move(h), [](double) { return 1.0; });
    return out;
}

TimeDependentHamiltonian& TimeDependentHamiltonian::add_term(Operator h, Coefficient c) {
    if (!(h.space() == space_)) {
        throw Error(ErrorKind::InvalidDimension, "Hamiltonian term lives on a different mode space");
    }
    if (!h.is_hermitian()) {
        throw Error(ErrorKind::InvalidOperator, "Hamiltonian term is not Hermitian");
    }
    terms_.push_back({std::move(h), std::move(c)});
    return *this;
}

Operator TimeDependentHamiltonian::operator()(double t) const {
    Operator h = Operator::zero(space_);
    for (const auto& term : terms_) {
        h += term.coefficient(t) * term.op;
    }
    return h;
}

Operator lindblad_rhs(const DensityMatrix& rho, const Operator& h, const std::vector<Dissipator>& dissipators) {
    if (!(rho.space() == h.space())) {
        throw Error(ErrorKind::InvalidDimension, "lindblad_rhs: Hamiltonian and state spaces differ");
    }
    const Matrix& r = rho.matrix();
    const cplx minus_i(0.0, -1.0);
    Matrix out = minus_i * (h.matrix() * r - r * h.matrix());
    for (const auto& d : dissipators) {
        if (!(d.jump().space() == rho.space())) {
            throw Error(ErrorKind::InvalidDimension, "lindblad_rhs: jump operator space differs from state");
        }
        const Matrix& a = d.jump().matrix();
        const Matrix ada = a.adjoint() * a;
        out += d.rate() * (a * r * a.adjoint() - 0.5 * (ada * r + r * ada));
    }
    return Operator(rho.space(), std::move(out));
}

namespace {

using Sparse = Eigen::SparseMatrix<cplx>;

Sparse to_sparse(const Matrix& m) { return m.sparseView(0.0, 0.0); }

// Precompiled generator: the ladder operators are extremely sparse, so the
// hot loop runs sparse x dense products while the state stays dense.
class Generator {
public:
    explicit Generator(const EvolutionProblem& p) {
        for (const auto& term : p.hamiltonian.terms()) {
            h_terms_.push_back(to_sparse(term.op.matrix()));
            coefficients_.push_back(term.coefficient);
        }
        const Eigen::Index n = p.hamiltonian.space().total_dim();
        Matrix anti = Matrix::Zero(n, n);
        for (const auto& d : p.dissipators) {
            if (!(d.jump().space() == p.hamiltonian.space())) {
                throw Error(ErrorKind::InvalidDimension, "jump operator space differs from Hamiltonian space");
            }
            if (d.rate() == 0.0) continue;
            const Matrix& a = d.jump().matrix();
            anti += 0.5 * d.rate() * (a.adjoint() * a);
            jumps_.push_back(to_sparse(std::sqrt(d.rate()) * a));
            jumps_adj_.push_back(jumps_.back().adjoint());
        }
        damping_ = to_sparse(anti);
        scratch_.resize(n, n);
    }

    // Valid for Hermitian rho: -i H_eff rho + h.c. + sum_k A_k rho A_k^+.
    void apply(double t, const Matrix& rho, Matrix& out) {
        out.noalias() = damping_ * rho;
        out *= cplx(-1.0, 0.0);
        for (std::size_t k = 0; k < h_terms_.size(); ++k) {
            const double c = coefficients_[k](t);
            if (c == 0.0) continue;
            out.noalias() += cplx(0.0, -c) * (h_terms_[k] * rho);
        }
        out += out.adjoint().eval();
        for (std::size_t k = 0; k < jumps_.size(); ++k) {
            scratch_.noalias() = jumps_[k] * rho;
            out.noalias() += scratch_ * jumps_adj_[k];
        }
    }

private:
    std::vector<Sparse> h_terms_;
    std::vector<TimeDependentHamiltonian::Coefficient> coefficients_;
    std::vector<Sparse> jumps_;
    std::vector<Sparse> jumps_adj_;
    Sparse damping_;
    Matrix scratch_;
};

void validate(const EvolutionProblem& p) {
    if (!(p.initial_state.space() == p.hamiltonian.space())) {
        throw Error(ErrorKind::InvalidDimension, "initial state and Hamiltonian spaces differ");
    }
    if (!(p.t_end > p.t_start)) {
        throw Error(ErrorKind::InvalidParameter, "t_end must exceed t_start");
    }
    if (!(p.step > 0.0) || p.step > (p.t_end - p.t_start) * (1.0 + 1e-12)) {
        throw Error(ErrorKind::InvalidParameter, "step must lie in (0, t_end - t_start]");
    }
    if (p.capture_stride < 0) {
        throw Error(ErrorKind::InvalidParameter, "capture stride must be >= 0");
    }
}

}  // namespace

EvolutionResult evolve(const EvolutionProblem& problem) {
    validate(problem);
    Generator gen(problem);

    const double span = problem.t_end - problem.t_start;
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / problem.step - 1e-9)));
    const double h = span / static_cast<double>(steps);
    const ModeSpace& space = problem.hamiltonian.space();

    Matrix rho = problem.initial_state.matrix();
    const Eigen::Index n = rho.rows();
    Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), stage(n, n);

    std::vector<Snapshot> trajectory;
    const int stride = problem.capture_stride;
    if (stride > 0) trajectory.push_back({problem.t_start, Operator(space, rho)});

    double max_dev = 0.0;
    double dev = 0.0;
    for (long s = 0; s < steps; ++s) {
        const double t = problem.t_start + h * static_cast<double>(s);
        gen.apply(t, rho, k1);
        stage = rho + (0.5 * h) * k1;
        gen.apply(t + 0.5 * h, stage, k2);
        stage = rho + (0.5 * h) * k2;
        gen.apply(t + 0.5 * h, stage, k3);
        stage = rho + h * k3;
        gen.apply(t + h, stage, k4);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint()).eval();

        dev = std::abs(rho.trace() - cplx(1.0, 0.0));
        if (!std::isfinite(dev) || dev > kDivergedTraceDeviation) {
            std::ostringstream msg;
            msg << "trace deviation " << dev << " at t=" << t + h << " with step size " << h
                << "; reduce the step";
            throw Error(ErrorKind::IntegrationDiverged, msg.str());
        }
        max_dev = std::max(max_dev, dev);

        const bool last = (s + 1 == steps);
        if (stride > 0 && ((s + 1) % stride == 0 || last)) {
            const double t_cap = last ? problem.t_end : t + h;
            trajectory.push_back({t_cap, Operator(space, rho)});
        }
    }

    Matrix normalized = rho / rho.trace();
    opalg::StateTolerance tol;
    tol.min_eigenvalue = -1e-6;
    DensityMatrix final_state(Operator(space, std::move(normalized)), tol);
    return {std::move(final_state), std::move(trajectory), dev, max_dev, h, steps};
}

}  // namespace ertrans::lindblad
