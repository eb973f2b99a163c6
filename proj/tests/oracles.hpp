#pragma once

// Finite-difference cross-checks shared by the unit and acceptance suites.

#include "ertrans/spinham.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oracles {

struct DerivativeReport {
    int transitions = 0;
    double worst_gradient = 0.0;   // max |fd - analytic| / |nu|
    double worst_curvature = 0.0;  // max |fd - u.C.u| / ||C||_2
};

inline double gap(const ertrans::spin::SpinParams& p, const Eigen::Vector3d& B, int m, int n) {
    const auto l = ertrans::spin::energy_levels(p, B);
    return l.frequency(n) - l.frequency(m);
}

// Transitions whose two levels sit at least `margin_GHz` from every other
// level at random fields |B| in [5, 100] mT, checked against central
// differences with a 10 uT step.
inline DerivativeReport derivative_oracle(const ertrans::spin::SpinParams& p, int fields, int per_field,
                                          unsigned seed, double margin_GHz = 5e-3) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> mag(5e-3, 0.1);
    const double h = 10e-6;
    DerivativeReport rep;
    for (int f = 0; f < fields; ++f) {
        const Eigen::Vector3d B = Eigen::Vector3d(N(rng), N(rng), N(rng)).normalized() * mag(rng);
        const auto levels = ertrans::spin::energy_levels(p, B);
        const int count = levels.count();
        std::vector<int> isolated;
        for (int k = 0; k < count; ++k) {
            double d = 1e9;
            for (int j = 0; j < count; ++j) {
                if (j != k) d = std::min(d, std::abs(levels.frequency_GHz(k) - levels.frequency_GHz(j)));
            }
            if (d > margin_GHz) isolated.push_back(k + 1);
        }
        if (isolated.size() < 2) continue;
        std::shuffle(isolated.begin(), isolated.end(), rng);
        int done = 0;
        for (std::size_t a = 0; a + 1 < isolated.size() && done < per_field; a += 2, ++done) {
            const int m = std::min(isolated[a], isolated[a + 1]);
            const int n = std::max(isolated[a], isolated[a + 1]);
            const auto s = ertrans::spin::zeeman_sensitivity(p, B, m, n);
            const double f0 = gap(p, B, m, n);
            Eigen::Vector3d fd;
            for (int i = 0; i < 3; ++i) {
                const Eigen::Vector3d e = Eigen::Vector3d::Unit(i) * h;
                fd(i) = (gap(p, B + e, m, n) - gap(p, B - e, m, n)) / (2 * h) * 1e9;
            }
            rep.worst_gradient = std::max(rep.worst_gradient, (fd - s.nu_Hz_per_T).norm() / s.nu_Hz_per_T.norm());

            const Eigen::Matrix3d sym = 0.5 * (s.C_Hz_per_T2 + s.C_Hz_per_T2.transpose());
            const double cnorm = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(sym).eigenvalues().cwiseAbs().maxCoeff();
            for (int k = 0; k < 3; ++k) {
                const Eigen::Vector3d u = Eigen::Vector3d(N(rng), N(rng), N(rng)).normalized();
                const double second = (gap(p, B + h * u, m, n) - 2 * f0 + gap(p, B - h * u, m, n)) / (h * h) * 1e9;
                rep.worst_curvature = std::max(rep.worst_curvature, std::abs(second - u.dot(sym * u)) / cnorm);
            }
            ++rep.transitions;
        }
    }
    return rep;
}

}  // namespace oracles
