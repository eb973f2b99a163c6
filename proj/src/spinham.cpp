#include "ertrans/spinham.hpp"

#include "ertrans/error.hpp"
#include "ertrans/keyvalue.hpp"
#include "ertrans/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

namespace ertrans::spin {

using opalg::cplx;

namespace {

bool is_half_integer(double j) {
    const double twice = 2.0 * j;
    return j > 0.0 && std::abs(twice - std::round(twice)) < 1e-12;
}

Eigen::Matrix3d matrix_from(const std::vector<double>& v) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = v[static_cast<std::size_t>(3 * r + c)];
    return m;
}

void symmetrize(Eigen::Matrix3d& m, const char* name, const std::string& origin, std::vector<std::string>* warnings) {
    const double asym_MHz = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym_MHz > 1e-3 && warnings != nullptr) {
        std::ostringstream msg;
        msg << origin << ": " << name << " tensor asymmetric by " << asym_MHz * 1e3 << " kHz; symmetrized";
        warnings->push_back(msg.str());
    }
    m = 0.5 * (m + m.transpose()).eval();
}

struct Basis {
    std::array<Matrix, 3> S;  // electron, embedded
    std::array<Matrix, 3> I;  // nucleus, embedded
};

Basis composite_basis(const SpinParams& p) {
    const auto s = spin_matrices(p.S);
    const auto i = spin_matrices(p.I);
    const Eigen::Index ds = s[0].dim();
    const Eigen::Index di = i[0].dim();
    Basis b;
    for (int k = 0; k < 3; ++k) {
        b.S[k] = opalg::kron(s[k].matrix(), Matrix::Identity(di, di));
        b.I[k] = opalg::kron(Matrix::Identity(ds, ds), i[k].matrix());
    }
    return b;
}

opalg::ModeSpace spin_space(const SpinParams& p) {
    return opalg::ModeSpace({static_cast<int>(std::lround(2.0 * p.S + 1.0)), static_cast<int>(std::lround(2.0 * p.I + 1.0))});
}

void check_label(int label, int count, const char* what) {
    if (label < 1 || label > count) {
        throw Error(ErrorKind::InvalidPair,
                    std::string(what) + " label " + std::to_string(label) + " outside 1.." + std::to_string(count));
    }
}

// Eigen-decomposition at one field with degenerate clusters rotated so that
// the Zeeman operator along the probe direction is diagonal inside each one.
struct Analysis {
    Eigen::VectorXd freq;
    Matrix vectors;
    std::array<Matrix, 3> zeta;  // in the (rotated) eigenbasis
    std::vector<int> cluster;

    int count() const { return static_cast<int>(freq.size()); }

    Eigen::Vector3d gradient(int k) const {
        return {zeta[0](k, k).real(), zeta[1](k, k).real(), zeta[2](k, k).real()};
    }

    Eigen::Matrix3d hessian(int k) const {
        Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
        for (int l = 0; l < count(); ++l) {
            if (cluster[l] == cluster[k]) continue;
            const double denom = freq(k) - freq(l);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) h(i, j) += 2.0 * (zeta[i](k, l) * zeta[j](l, k)).real() / denom;
        }
        return h;
    }
};

Analysis analyze(const SpinParams& params, const Eigen::Vector3d& B, const SensitivityOptions& opts) {
    if (!(opts.degeneracy_tol_GHz >= 0.0)) throw Error(ErrorKind::InvalidParameter, "degeneracy tolerance must be >= 0");
    const auto es = opalg::hermitian_eigensolve(build_hamiltonian(params, B));
    Analysis a;
    a.freq = es.values;
    a.vectors = es.vectors;
    const int n = a.count();

    a.cluster.assign(static_cast<std::size_t>(n), 0);
    for (int k = 1; k < n; ++k) {
        a.cluster[k] = a.cluster[k - 1] + ((a.freq(k) - a.freq(k - 1) < opts.degeneracy_tol_GHz) ? 0 : 1);
    }

    const auto zeta = zeeman_operators(params);
    Eigen::Vector3d u = B.norm() > 0.0 ? B.normalized() : opts.probe_axis.normalized();
    const Matrix zeta_u = u(0) * zeta[0] + u(1) * zeta[1] + u(2) * zeta[2];
    for (int start = 0; start < n;) {
        int end = start + 1;
        while (end < n && a.cluster[end] == a.cluster[start]) ++end;
        if (end - start > 1) {
            const Matrix block = a.vectors.middleCols(start, end - start);
            Matrix proj = block.adjoint() * zeta_u * block;
            proj = 0.5 * (proj + proj.adjoint()).eval();
            Eigen::SelfAdjointEigenSolver<Matrix> sub(proj);
            a.vectors.middleCols(start, end - start) = block * sub.eigenvectors();
        }
        start = end;
    }
    for (int i = 0; i < 3; ++i) a.zeta[i] = a.vectors.adjoint() * zeta[i] * a.vectors;
    return a;
}

TransitionRecord make_record(const Analysis& a, int lo, int hi, const CoherenceModel& model) {
    TransitionRecord r;
    r.lower = lo + 1;
    r.upper = hi + 1;
    r.frequency_GHz = a.freq(hi) - a.freq(lo);
    for (int i = 0; i < 3; ++i) r.dipole_GHz_per_T(i) = std::abs(a.zeta[i](lo, hi));
    const Eigen::Vector3d nu = 1e9 * (a.gradient(hi) - a.gradient(lo));
    const Eigen::Matrix3d c = 1e9 * (a.hessian(hi) - a.hessian(lo));
    r.S1_Hz_per_T = nu.norm();
    r.S2_Hz_per_T2 = 0.5 * Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(0.5 * (c + c.transpose()))
                               .eigenvalues()
                               .cwiseAbs()
                               .maxCoeff();
    r.T2_s = coherence_time(nu, c, model);
    return r;
}

}  // namespace

void SpinParams::validate() const {
    if (!is_half_integer(S)) throw Error(ErrorKind::InvalidParameter, "electron spin S must be a positive half-integer");
    if (!is_half_integer(I)) throw Error(ErrorKind::InvalidParameter, "nuclear spin I must be a positive half-integer");
    if (!g.allFinite() || !A_MHz.allFinite() || !Q_MHz.allFinite() || !std::isfinite(g_n)) {
        throw Error(ErrorKind::InvalidParameter, "spin tensors must be finite");
    }
    if (!(constants.beta_e_GHz_per_T > 0.0) || !(constants.beta_n_MHz_per_T > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "magneton constants must be > 0");
    }
}

namespace {

SpinParams from_document(const kv::Document& doc, std::vector<std::string>* warnings) {
    SpinParams p;
    std::set<std::string> seen;
    for (const auto& e : doc.entries()) {
        const std::string id = e.section.empty() ? e.key : e.section + "." + e.key;
        if (id == "site") p.site = e.value;
        else if (id == "source") p.source = e.value;
        else if (id == "S") p.S = kv::to_double(doc, e);
        else if (id == "I") p.I = kv::to_double(doc, e);
        else if (id == "g_n") p.g_n = kv::to_double(doc, e);
        else if (id == "g") p.g = matrix_from(kv::to_doubles(doc, e, 9));
        else if (id == "A_MHz") p.A_MHz = matrix_from(kv::to_doubles(doc, e, 9));
        else if (id == "Q_MHz") p.Q_MHz = matrix_from(kv::to_doubles(doc, e, 9));
        else if (id == "constants.beta_e_GHz_per_T") p.constants.beta_e_GHz_per_T = kv::to_double(doc, e);
        else if (id == "constants.beta_n_MHz_per_T") p.constants.beta_n_MHz_per_T = kv::to_double(doc, e);
        else throw Error(ErrorKind::Config, doc.where(e) + ": unknown key '" + id + "' in spin-parameter file");
        seen.insert(id);
    }
    for (const char* required : {"g", "A_MHz", "Q_MHz", "g_n", "S", "I"}) {
        if (!seen.count(required)) {
            throw Error(ErrorKind::Config, doc.origin() + ": spin-parameter file is missing key '" + required + "'");
        }
    }
    symmetrize(p.A_MHz, "A", doc.origin(), warnings);
    symmetrize(p.Q_MHz, "Q", doc.origin(), warnings);
    p.validate();
    return p;
}

}  // namespace

SpinParams parse_spin_params(std::string_view text, const std::string& origin, std::vector<std::string>* warnings) {
    return from_document(kv::Document::parse(text, origin), warnings);
}

SpinParams load_spin_params(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    return from_document(kv::Document::load(path), warnings);
}

std::array<Operator, 3> spin_matrices(double j) {
    if (!is_half_integer(j)) {
        throw Error(ErrorKind::InvalidParameter, "spin quantum number must be a positive multiple of 1/2");
    }
    const int d = static_cast<int>(std::lround(2.0 * j)) + 1;
    Matrix jp = Matrix::Zero(d, d);
    Matrix jz = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = j - k;
        jz(k, k) = m;
        if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    const Matrix jm = jp.adjoint();
    const auto space = opalg::ModeSpace::single(d);
    return {Operator(space, 0.5 * (jp + jm)), Operator(space, cplx(0.0, -0.5) * (jp - jm)), Operator(space, jz)};
}

std::array<Matrix, 3> zeeman_operators(const SpinParams& params) {
    const Basis b = composite_basis(params);
    const double beta_n = params.constants.beta_n_MHz_per_T * 1e-3;
    std::array<Matrix, 3> zeta;
    for (int i = 0; i < 3; ++i) {
        zeta[i] = -beta_n * params.g_n * b.I[i];
        for (int j = 0; j < 3; ++j) zeta[i] += params.constants.beta_e_GHz_per_T * params.g(i, j) * b.S[j];
    }
    return zeta;
}

Operator build_hamiltonian(const SpinParams& params, const Eigen::Vector3d& B_T) {
    params.validate();
    if (!B_T.allFinite()) throw Error(ErrorKind::InvalidParameter, "magnetic field must be finite");
    const Basis b = composite_basis(params);
    const Eigen::Index n = b.S[0].rows();
    Matrix h = Matrix::Zero(n, n);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            h += (params.A_MHz(i, j) * 1e-3) * (b.I[i] * b.S[j]);
            h += (params.Q_MHz(i, j) * 1e-3) * (b.I[i] * b.I[j]);
        }
    }
    const auto zeta = zeeman_operators(params);
    for (int i = 0; i < 3; ++i) h += B_T(i) * zeta[i];
    // Products of Hermitian factors leave rounding-level anti-Hermitian residue.
    h = 0.5 * (h + h.adjoint()).eval();
    return Operator(spin_space(params), std::move(h));
}

double LevelSet::frequency(int label) const {
    check_label(label, count(), "level");
    return frequency_GHz(label - 1);
}

LevelSet energy_levels(const SpinParams& params, const Eigen::Vector3d& B_T) {
    auto es = opalg::hermitian_eigensolve(build_hamiltonian(params, B_T));
    return {std::move(es.values), std::move(es.vectors)};
}

Eigen::Vector3d transition_dipole(const SpinParams& params, const Eigen::Vector3d& B_T, int m, int n) {
    const int count = params.dim();
    check_label(m, count, "first");
    check_label(n, count, "second");
    if (m == n) throw Error(ErrorKind::InvalidPair, "dipole needs two distinct levels (m == n is a static moment)");
    const Analysis a = analyze(params, B_T, {});
    Eigen::Vector3d d;
    for (int i = 0; i < 3; ++i) d(i) = std::abs(a.zeta[i](m - 1, n - 1));
    return d;
}

ZeemanSensitivity zeeman_sensitivity(const SpinParams& params, const Eigen::Vector3d& B_T, int m, int n,
                                     const SensitivityOptions& opts) {
    const int count = params.dim();
    check_label(m, count, "first");
    check_label(n, count, "second");
    if (m == n) throw Error(ErrorKind::InvalidPair, "sensitivity needs two distinct levels");
    const Analysis a = analyze(params, B_T, opts);
    const int lo = std::min(m, n) - 1;
    const int hi = std::max(m, n) - 1;
    if (a.cluster[lo] == a.cluster[hi]) {
        throw Error(ErrorKind::DegenerateTransition, "levels " + std::to_string(lo + 1) + " and " + std::to_string(hi + 1) +
                                                         " are degenerate within tolerance");
    }
    return {1e9 * (a.gradient(hi) - a.gradient(lo)), 1e9 * (a.hessian(hi) - a.hessian(lo))};
}

double coherence_time(const Eigen::Vector3d& nu, const Eigen::Matrix3d& C, const CoherenceModel& model) {
    if (!(model.delta_B_T > 0.0) || !std::isfinite(model.delta_B_T)) {
        throw Error(ErrorKind::InvalidParameter, "field fluctuation must be > 0");
    }
    if (!nu.allFinite() || !C.allFinite()) throw Error(ErrorKind::InvalidParameter, "sensitivities must be finite");
    const double s1 = nu.norm();
    const Eigen::Matrix3d sym = 0.5 * (C + C.transpose());
    const double s2 = 0.5 * Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(sym).eigenvalues().cwiseAbs().maxCoeff();
    const double db = model.delta_B_T;
    const double rate = s1 * db + s2 * db * db;
    if (rate == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (std::numbers::pi * rate);
}

std::vector<TransitionRecord> all_transitions(const SpinParams& params, const Eigen::Vector3d& B_T,
                                              const CoherenceModel& model, const SensitivityOptions& opts) {
    const Analysis a = analyze(params, B_T, opts);
    std::vector<TransitionRecord> out;
    for (int lo = 0; lo < a.count(); ++lo) {
        for (int hi = lo + 1; hi < a.count(); ++hi) {
            if (a.cluster[lo] == a.cluster[hi]) continue;
            out.push_back(make_record(a, lo, hi, model));
        }
    }
    return out;
}

std::vector<TransitionRecord> rank_transitions(const SpinParams& params, const Eigen::Vector3d& B_T,
                                               const FrequencyWindow& window, const CoherenceModel& model,
                                               const SensitivityOptions& opts) {
    if (!(window.lo_GHz <= window.hi_GHz)) throw Error(ErrorKind::InvalidParameter, "frequency window is inverted");
    std::vector<TransitionRecord> out;
    for (auto& r : all_transitions(params, B_T, model, opts)) {
        if (r.frequency_GHz >= window.lo_GHz && r.frequency_GHz <= window.hi_GHz) out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const TransitionRecord& x, const TransitionRecord& y) {
        if (x.T2_s != y.T2_s) return x.T2_s > y.T2_s;
        return x.frequency_GHz < y.frequency_GHz;
    });
    return out;
}

FieldSweep field_sweep(const SpinParams& params, const Eigen::Vector3d& axis, double B_max_T, int steps, int workers) {
    if (steps < 2) throw Error(ErrorKind::InvalidParameter, "field sweep needs at least 2 points");
    if (!(axis.norm() > 0.0)) throw Error(ErrorKind::InvalidParameter, "sweep axis must be nonzero");
    if (!std::isfinite(B_max_T)) throw Error(ErrorKind::InvalidParameter, "sweep range must be finite");
    const Eigen::Vector3d u = axis.normalized();

    FieldSweep out;
    out.axis = u;
    for (int s = 0; s < steps; ++s) out.field_T.push_back(B_max_T * s / (steps - 1));

    const auto solved = parallel_map(static_cast<std::size_t>(steps), workers,
                                     [&](std::size_t s) { return energy_levels(params, out.field_T[s] * u); });

    // Sequential relabeling: greedy maximum-overlap assignment step to step.
    const int n = solved.front().count();
    Matrix tracked = solved.front().vectors;
    out.levels_GHz.push_back(solved.front().frequency_GHz);
    for (int s = 1; s < steps; ++s) {
        const LevelSet& cur = solved[static_cast<std::size_t>(s)];
        const Eigen::MatrixXd overlap = (tracked.adjoint() * cur.vectors).cwiseAbs2();
        std::vector<std::tuple<double, int, int>> pairs;
        pairs.reserve(static_cast<std::size_t>(n * n));
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) pairs.emplace_back(overlap(k, l), k, l);
        std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
        std::vector<int> assign(static_cast<std::size_t>(n), -1);
        std::vector<bool> used(static_cast<std::size_t>(n), false);
        for (const auto& [ov, k, l] : pairs) {
            if (assign[k] >= 0 || used[l]) continue;
            assign[k] = l;
            used[l] = true;
        }
        Eigen::VectorXd levels(n);
        Matrix next(tracked.rows(), n);
        for (int k = 0; k < n; ++k) {
            levels(k) = cur.frequency_GHz(assign[k]);
            next.col(k) = cur.vectors.col(assign[k]);
        }
        tracked = std::move(next);
        out.levels_GHz.push_back(std::move(levels));
    }
    return out;
}

std::vector<ZefozPoint> find_zefoz(const SpinParams& params, const std::vector<Eigen::Vector3d>& candidates,
                                   double tol_Hz_per_T, const CoherenceModel& model, const SensitivityOptions& opts) {
    if (!(tol_Hz_per_T > 0.0)) throw Error(ErrorKind::InvalidParameter, "ZEFOZ tolerance must be > 0");
    std::vector<ZefozPoint> out;
    for (const auto& B : candidates) {
        for (const auto& r : all_transitions(params, B, model, opts)) {
            if (r.S1_Hz_per_T < tol_Hz_per_T) {
                out.push_back({B, r.lower, r.upper, r.frequency_GHz, r.S1_Hz_per_T, r.T2_s});
            }
        }
    }
    return out;
}

Eigen::Vector3d axis_from_name(const std::string& name) {
    if (name == "D1" || name == "x" || name == "X") return Eigen::Vector3d::UnitX();
    if (name == "D2" || name == "y" || name == "Y") return Eigen::Vector3d::UnitY();
    if (name == "b" || name == "z" || name == "Z") return Eigen::Vector3d::UnitZ();
    throw Error(ErrorKind::InvalidParameter, "unknown axis '" + name + "' (use D1, D2 or b)");
}

}  // namespace ertrans::spin
