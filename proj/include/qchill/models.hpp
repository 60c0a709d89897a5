// models.hpp - device Hamiltonians, bath contact operators and spectral filters

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qchill/core.hpp"

namespace qchill {

// ---------------------------------------------------------------------------
// Spectral filters
// ---------------------------------------------------------------------------

struct FlatFilter {};

// Transmission is 1 for |w| <= omega_max and 0 above.
struct HighCutoff {
    double omega_max{0.0};
};

// Symmetric Lorentzian in |w|, equal to 1 at the center.
struct Lorentzian {
    double center{0.0};
    double width{0.0};
};

// High cutoff that follows the work frequency w_w = w_h - w_c of the device
// it is attached to (cutoff at w_w + offset). Must be resolved against model
// parameters before evaluating a transmission.
struct TrackingCutoff {
    double offset{0.0};
};

using SpectralFilter = std::variant<FlatFilter, HighCutoff, Lorentzian, TrackingCutoff>;

inline double transmission(const SpectralFilter& filter, double omega)
{
    const double a = std::abs(omega);
    return std::visit(
        [a](const auto& f) -> double {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, FlatFilter>) {
                return 1.0;
            } else if constexpr (std::is_same_v<F, HighCutoff>) {
                return a <= f.omega_max ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<F, Lorentzian>) {
                const double d = a - f.center;
                return f.width * f.width / (d * d + f.width * f.width);
            } else {
                throw std::logic_error("tracking cutoff evaluated before being resolved");
            }
        },
        filter);
}

inline void validate(const SpectralFilter& filter)
{
    if (const auto* h = std::get_if<HighCutoff>(&filter); h && !(h->omega_max > 0.0)) {
        throw std::invalid_argument("high cutoff omega_max must be positive");
    }
    if (const auto* l = std::get_if<Lorentzian>(&filter)) {
        if (!(l->center > 0.0) || !(l->width > 0.0)) {
            throw std::invalid_argument("lorentzian center and width must be positive");
        }
    }
    if (const auto* t = std::get_if<TrackingCutoff>(&filter); t && !std::isfinite(t->offset)) {
        throw std::invalid_argument("tracking cutoff offset must be finite");
    }
}

// ---------------------------------------------------------------------------
// Baths
// ---------------------------------------------------------------------------

inline constexpr double kDefaultGamma = 1e-3;

struct BathSpec {
    Bath label{Bath::w};
    double temperature{1.0};
    double gamma{kDefaultGamma};
    SpectralFilter filter{FlatFilter{}};
};

inline void validate(const BathSpec& bath)
{
    if (!(bath.temperature > 0.0) || !std::isfinite(bath.temperature)) {
        throw std::invalid_argument("bath " + std::string(to_string(bath.label)) +
                                    ": temperature must be positive");
    }
    if (!(bath.gamma > 0.0) || !std::isfinite(bath.gamma)) {
        throw std::invalid_argument("bath " + std::string(to_string(bath.label)) +
                                    ": gamma must be positive");
    }
    validate(bath.filter);
}

using BathSet = PerBath<BathSpec>;

inline BathSet make_baths(double t_w, double t_h, double t_c, double gamma = kDefaultGamma)
{
    BathSet baths;
    baths[Bath::w] = BathSpec{Bath::w, t_w, gamma, FlatFilter{}};
    baths[Bath::h] = BathSpec{Bath::h, t_h, gamma, FlatFilter{}};
    baths[Bath::c] = BathSpec{Bath::c, t_c, gamma, FlatFilter{}};
    return baths;
}

inline void validate(const BathSet& baths)
{
    for (Bath b : kAllBaths) {
        if (baths[b].label != b) {
            throw std::invalid_argument("bath set entry " + std::string(to_string(b)) +
                                        " carries label " + std::string(to_string(baths[b].label)));
        }
        validate(baths[b]);
    }
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

enum class ModelKind {
    ThreeLevel,
    ThreeLevelShorted,
    FourLevel,
    FourLevelPrime,
    FourLevelDoublePrime,
    ThreeQubit,
};

inline std::string_view to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::ThreeLevel: return "three_level";
    case ModelKind::ThreeLevelShorted: return "three_level_shorted";
    case ModelKind::FourLevel: return "four_level";
    case ModelKind::FourLevelPrime: return "four_level_prime";
    case ModelKind::FourLevelDoublePrime: return "four_level_double_prime";
    case ModelKind::ThreeQubit: return "three_qubit";
    }
    return "?";
}

inline ModelKind model_kind_from_string(std::string_view s)
{
    for (ModelKind k : {ModelKind::ThreeLevel, ModelKind::ThreeLevelShorted, ModelKind::FourLevel,
                        ModelKind::FourLevelPrime, ModelKind::FourLevelDoublePrime,
                        ModelKind::ThreeQubit}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown model kind '" + std::string(s) + "'");
}

inline bool is_four_level_family(ModelKind k)
{
    return k == ModelKind::FourLevel || k == ModelKind::FourLevelPrime ||
           k == ModelKind::FourLevelDoublePrime;
}

struct ModelParams {
    double omega_c{0.0};
    double omega_h{0.0};
    double g{0.0};
    double kappa{0.0};

    double omega_w() const { return omega_h - omega_c; }
};

struct SystemModel {
    ModelKind kind{ModelKind::ThreeLevel};
    Eigen::Index dimension{0};
    Matrix hamiltonian;
    PerBath<Matrix> contacts;
    ModelParams params;
    std::vector<std::string> basis_labels;
    std::vector<std::string> warnings;
};

struct Eigensystem {
    RealVector energies;  // ascending
    Matrix basis;         // column k is eigenvector k in the construction basis
};

namespace detail {

inline void require_frequencies(double omega_c, double omega_h)
{
    if (!(omega_c > 0.0) || !(omega_h > 0.0) || !std::isfinite(omega_c) || !std::isfinite(omega_h)) {
        throw std::invalid_argument("frequencies must be positive and finite");
    }
    if (!(omega_c < omega_h)) {
        throw std::invalid_argument("omega_c must be strictly smaller than omega_h");
    }
}

inline void require_coupling(double g)
{
    if (!(g >= 0.0) || !std::isfinite(g)) {
        throw std::invalid_argument("g must be non-negative and finite");
    }
}

inline Matrix symmetric_pair(Eigen::Index dim, Eigen::Index i, Eigen::Index j)
{
    return dyad(dim, i, j) + dyad(dim, j, i);
}

inline void four_level_warnings(SystemModel& m)
{
    const auto& p = m.params;
    if (p.g > p.omega_h / 10.0) {
        m.warnings.push_back("g exceeds omega_h/10; weak-interaction picture is marginal");
    }
    if (p.g >= p.omega_c) {
        m.warnings.push_back("g >= omega_c; eigenstate labels no longer follow ascending energy");
    }
}

} // namespace detail

// Three-level chiller: H = w_c|2><2| + w_h|3><3|, basis {|1>,|2>,|3>}.
inline SystemModel build_three_level(double omega_c, double omega_h)
{
    detail::require_frequencies(omega_c, omega_h);
    SystemModel m;
    m.kind = ModelKind::ThreeLevel;
    m.dimension = 3;
    m.params = {omega_c, omega_h, 0.0, 0.0};
    m.hamiltonian = Matrix::Zero(3, 3);
    m.hamiltonian(1, 1) = omega_c;
    m.hamiltonian(2, 2) = omega_h;
    m.contacts[Bath::c] = detail::symmetric_pair(3, 0, 1);
    m.contacts[Bath::h] = detail::symmetric_pair(3, 0, 2);
    m.contacts[Bath::w] = detail::symmetric_pair(3, 1, 2);
    m.basis_labels = {"|1>", "|2>", "|3>"};
    return m;
}

// Three-level chiller whose cold bath also touches the work transition with
// relative strength kappa (thermal short circuit).
inline SystemModel build_three_level_shorted(double omega_c, double omega_h, double kappa)
{
    if (!(kappa >= 0.0 && kappa <= 1.0)) {
        throw std::invalid_argument("kappa must lie in [0, 1]");
    }
    SystemModel m = build_three_level(omega_c, omega_h);
    m.kind = ModelKind::ThreeLevelShorted;
    m.params.kappa = kappa;
    m.contacts[Bath::c] += kappa * detail::symmetric_pair(3, 1, 2);
    return m;
}

// Four-level chiller in the basis {a,b,c,d}:
// H = w_c(|b><b| + |c><c|) + w_h|d><d| + g(|b><c| + h.c.).
inline SystemModel build_four_level(double omega_c, double omega_h, double g)
{
    detail::require_frequencies(omega_c, omega_h);
    detail::require_coupling(g);
    SystemModel m;
    m.kind = ModelKind::FourLevel;
    m.dimension = 4;
    m.params = {omega_c, omega_h, g, 0.0};
    m.hamiltonian = Matrix::Zero(4, 4);
    m.hamiltonian(1, 1) = omega_c;
    m.hamiltonian(2, 2) = omega_c;
    m.hamiltonian(3, 3) = omega_h;
    m.hamiltonian(1, 2) = g;
    m.hamiltonian(2, 1) = g;
    m.contacts[Bath::c] = detail::symmetric_pair(4, 0, 1);
    m.contacts[Bath::h] = detail::symmetric_pair(4, 0, 3);
    m.contacts[Bath::w] = detail::symmetric_pair(4, 2, 3);
    m.basis_labels = {"|a>", "|b>", "|c>", "|d>"};
    detail::four_level_warnings(m);
    return m;
}

// Variant with the split pair at the top: leaks run from the work to the hot bath.
inline SystemModel build_four_level_prime(double omega_c, double omega_h, double g)
{
    detail::require_frequencies(omega_c, omega_h);
    detail::require_coupling(g);
    SystemModel m;
    m.kind = ModelKind::FourLevelPrime;
    m.dimension = 4;
    m.params = {omega_c, omega_h, g, 0.0};
    m.hamiltonian = Matrix::Zero(4, 4);
    m.hamiltonian(1, 1) = omega_c;
    m.hamiltonian(2, 2) = omega_h;
    m.hamiltonian(3, 3) = omega_h;
    m.hamiltonian(2, 3) = g;
    m.hamiltonian(3, 2) = g;
    m.contacts[Bath::c] = detail::symmetric_pair(4, 0, 1);
    m.contacts[Bath::h] = detail::symmetric_pair(4, 0, 3);
    m.contacts[Bath::w] = detail::symmetric_pair(4, 1, 2);
    m.basis_labels = {"|a>", "|b>", "|c>", "|d>"};
    detail::four_level_warnings(m);
    return m;
}

// Variant with the split pair at the bottom: leaks run from the hot to the cold bath.
inline SystemModel build_four_level_double_prime(double omega_c, double omega_h, double g)
{
    detail::require_frequencies(omega_c, omega_h);
    detail::require_coupling(g);
    SystemModel m;
    m.kind = ModelKind::FourLevelDoublePrime;
    m.dimension = 4;
    m.params = {omega_c, omega_h, g, 0.0};
    m.hamiltonian = Matrix::Zero(4, 4);
    m.hamiltonian(2, 2) = omega_c;
    m.hamiltonian(3, 3) = omega_h;
    m.hamiltonian(0, 1) = g;
    m.hamiltonian(1, 0) = g;
    m.contacts[Bath::c] = detail::symmetric_pair(4, 1, 2);
    m.contacts[Bath::h] = detail::symmetric_pair(4, 0, 3);
    m.contacts[Bath::w] = detail::symmetric_pair(4, 2, 3);
    m.basis_labels = {"|a>", "|b>", "|c>", "|d>"};
    detail::four_level_warnings(m);
    return m;
}

// Index of the product state |n_w n_h n_c> in the lexicographic construction basis.
inline constexpr Eigen::Index qubit_index(int n_w, int n_h, int n_c) { return 4 * n_w + 2 * n_h + n_c; }

// Three interacting qubits on H_w (x) H_h (x) H_c with w_w = w_h - w_c and the
// three-body exchange g(|1_w 0_h 1_c><0_w 1_h 0_c| + h.c.).
inline SystemModel build_three_qubit(double omega_c, double omega_h, double g)
{
    detail::require_frequencies(omega_c, omega_h);
    detail::require_coupling(g);
    const double omega_w = omega_h - omega_c;
    SystemModel m;
    m.kind = ModelKind::ThreeQubit;
    m.dimension = 8;
    m.params = {omega_c, omega_h, g, 0.0};
    m.hamiltonian = Matrix::Zero(8, 8);
    for (int nw = 0; nw < 2; ++nw) {
        for (int nh = 0; nh < 2; ++nh) {
            for (int nc = 0; nc < 2; ++nc) {
                const auto k = qubit_index(nw, nh, nc);
                m.hamiltonian(k, k) = nw * omega_w + nh * omega_h + nc * omega_c;
                m.basis_labels.push_back("|" + std::to_string(nw) + std::to_string(nh) +
                                         std::to_string(nc) + ">");
            }
        }
    }
    const auto up = qubit_index(1, 0, 1);
    const auto down = qubit_index(0, 1, 0);
    m.hamiltonian(up, down) = g;
    m.hamiltonian(down, up) = g;

    for (Bath b : kAllBaths) {
        m.contacts[b] = Matrix::Zero(8, 8);
    }
    for (Eigen::Index k = 0; k < 8; ++k) {
        m.contacts[Bath::w](k ^ 4, k) = 1.0;
        m.contacts[Bath::h](k ^ 2, k) = 1.0;
        m.contacts[Bath::c](k ^ 1, k) = 1.0;
    }

    // Smallest nonzero Bohr gap of the uncoupled spectrum.
    std::vector<double> levels;
    for (Eigen::Index k = 0; k < 8; ++k) levels.push_back(m.hamiltonian(k, k).real());
    double min_gap = omega_h;
    for (double a : levels) {
        for (double b : levels) {
            const double d = std::abs(a - b);
            if (d > 1e-12 * omega_h) min_gap = std::min(min_gap, d);
        }
    }
    if (g >= min_gap) {
        m.warnings.push_back("g is not small against the smallest uncoupled Bohr gap");
    }
    return m;
}

inline SystemModel build_model(ModelKind kind, const ModelParams& p)
{
    switch (kind) {
    case ModelKind::ThreeLevel: return build_three_level(p.omega_c, p.omega_h);
    case ModelKind::ThreeLevelShorted: return build_three_level_shorted(p.omega_c, p.omega_h, p.kappa);
    case ModelKind::FourLevel: return build_four_level(p.omega_c, p.omega_h, p.g);
    case ModelKind::FourLevelPrime: return build_four_level_prime(p.omega_c, p.omega_h, p.g);
    case ModelKind::FourLevelDoublePrime: return build_four_level_double_prime(p.omega_c, p.omega_h, p.g);
    case ModelKind::ThreeQubit: return build_three_qubit(p.omega_c, p.omega_h, p.g);
    }
    throw std::invalid_argument("unknown model kind");
}

inline Eigensystem eigendecompose(const SystemModel& model)
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(model.hamiltonian);
    if (solver.info() != Eigen::Success) {
        throw SolverError("eigendecomposition failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// Eigenstates of the four-level family (and the trivially diagonal
// three-level models) in their conventional label order rather than by
// ascending energy. Four-level: |1>=|a>, |2>=(|b>-|c>)/sqrt2,
// |3>=(|b>+|c>)/sqrt2, |4>=|d>. Prime: |a>, |b>, (|c>-|d>)/sqrt2,
// (|c>+|d>)/sqrt2. Double prime: (|a>-|b>)/sqrt2, (|a>+|b>)/sqrt2, |c>, |d>.
// Returns nullopt for the three-qubit model.
inline std::optional<Eigensystem> labeled_eigensystem(const SystemModel& model)
{
    const auto& p = model.params;
    const double s = 1.0 / std::sqrt(2.0);
    Eigensystem es;
    switch (model.kind) {
    case ModelKind::ThreeLevel:
    case ModelKind::ThreeLevelShorted:
        es.energies = RealVector(3);
        es.energies << 0.0, p.omega_c, p.omega_h;
        es.basis = Matrix::Identity(3, 3);
        return es;
    case ModelKind::FourLevel:
        es.energies = RealVector(4);
        es.energies << 0.0, p.omega_c - p.g, p.omega_c + p.g, p.omega_h;
        es.basis = Matrix::Zero(4, 4);
        es.basis(0, 0) = 1.0;
        es.basis(1, 1) = s;
        es.basis(2, 1) = -s;
        es.basis(1, 2) = s;
        es.basis(2, 2) = s;
        es.basis(3, 3) = 1.0;
        return es;
    case ModelKind::FourLevelPrime:
        es.energies = RealVector(4);
        es.energies << 0.0, p.omega_c, p.omega_h - p.g, p.omega_h + p.g;
        es.basis = Matrix::Zero(4, 4);
        es.basis(0, 0) = 1.0;
        es.basis(1, 1) = 1.0;
        es.basis(2, 2) = s;
        es.basis(3, 2) = -s;
        es.basis(2, 3) = s;
        es.basis(3, 3) = s;
        return es;
    case ModelKind::FourLevelDoublePrime:
        es.energies = RealVector(4);
        es.energies << -p.g, p.g, p.omega_c, p.omega_h;
        es.basis = Matrix::Zero(4, 4);
        es.basis(0, 0) = s;
        es.basis(1, 0) = -s;
        es.basis(0, 1) = s;
        es.basis(1, 1) = s;
        es.basis(2, 2) = 1.0;
        es.basis(3, 3) = 1.0;
        return es;
    case ModelKind::ThreeQubit:
        return std::nullopt;
    }
    return std::nullopt;
}

// Populations <k|rho|k> over an eigenbasis.
inline RealVector populations(const Eigensystem& es, const Matrix& rho)
{
    return (es.basis.adjoint() * rho * es.basis).diagonal().real();
}

} // namespace qchill
