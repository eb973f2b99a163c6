#pragma once

// Fixed-step RK4 integration of the time-dependent Lindblad master equation
//
//   d rho/dt = -i [H(t), rho] + sum_k rate_k ( A_k rho A_k^+ - {A_k^+ A_k, rho}/2 ).

#include "ertrans/opalg.hpp"

#include <functional>
#include <vector>

namespace ertrans::lindblad {

using opalg::DensityMatrix;
using opalg::ModeSpace;
using opalg::Operator;

class Dissipator {
public:
    Dissipator(Operator jump, double rate);

    const Operator& jump() const noexcept { return jump_; }
    double rate() const noexcept { return rate_; }

private:
    Operator jump_;
    double rate_;
};

// H(t) = sum_k c_k(t) H_k with static Hermitian H_k.
class TimeDependentHamiltonian {
public:
    using Coefficient = std::function<double(double)>;

    struct Term {
        Operator op;
        Coefficient coefficient;
    };

    explicit TimeDependentHamiltonian(ModeSpace space) : space_(std::move(space)) {}

    static TimeDependentHamiltonian constant(Operator h);

    TimeDependentHamiltonian& add_term(Operator h, Coefficient c);

    Operator operator()(double t) const;

    const ModeSpace& space() const noexcept { return space_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }

private:
    ModeSpace space_;
    std::vector<Term> terms_;
};

struct EvolutionProblem {
    TimeDependentHamiltonian hamiltonian;
    std::vector<Dissipator> dissipators;
    DensityMatrix initial_state;
    double t_start = 0.0;
    double t_end = 1.0;
    double step = 1e-2;
    int capture_stride = 0;  // 0: final state only
};

struct Snapshot {
    double time;
    Operator rho;
};

struct EvolutionResult {
    DensityMatrix final_state;      // trace-renormalized
    std::vector<Snapshot> trajectory;
    double final_trace_deviation;   // |Tr rho - 1| before renormalization
    double max_trace_deviation;     // over every step
    double step;                    // the step actually used (span / steps)
    long steps;
};

// Hard stop for runaway integration.
inline constexpr double kDivergedTraceDeviation = 1e-3;

Operator lindblad_rhs(const DensityMatrix& rho, const Operator& h, const std::vector<Dissipator>& dissipators);

EvolutionResult evolve(const EvolutionProblem& problem);

}  // namespace ertrans::lindblad
