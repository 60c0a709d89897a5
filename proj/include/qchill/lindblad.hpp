// lindblad.hpp - Bohr-frequency channels, detailed-balance rates and the
// secular Lindblad generator

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qchill/core.hpp"
#include "qchill/models.hpp"

namespace qchill {

// Resolve filters that depend on the device (tracking cutoffs).
inline BathSpec resolve(const BathSpec& bath, const ModelParams& params)
{
    BathSpec out = bath;
    if (const auto* t = std::get_if<TrackingCutoff>(&bath.filter)) {
        out.filter = HighCutoff{params.omega_w() + t->offset};
    }
    return out;
}

inline BathSet resolve(const BathSet& baths, const ModelParams& params)
{
    BathSet out;
    for (Bath b : kAllBaths) out[b] = resolve(baths[b], params);
    return out;
}

struct RatePair {
    double down{0.0};  // emission into the bath, Gamma(+w)
    double up{0.0};    // absorption from the bath, Gamma(-w)
};

// Ohmic 3D rates: down = gamma w^3 (1 + n(w)) F(w), up = gamma w^3 n(w) F(w),
// with the Bose occupation n(w) = 1/(exp(w/T) - 1).
inline RatePair rate(const BathSpec& bath, double omega)
{
    if (!(omega > 0.0)) {
        throw std::invalid_argument("rate: Bohr frequency must be positive");
    }
    const double f = transmission(bath.filter, omega);
    if (f == 0.0) return {};
    const double x = omega / bath.temperature;
    // 1 + n = 1 / (1 - exp(-x))
    const double down = bath.gamma * omega * omega * omega * f / (-std::expm1(-x));
    return {down, down * std::exp(-x)};
}

// Gamma(omega) for a signed frequency: emission for omega > 0, absorption at
// |omega| for omega < 0, and zero at omega = 0 (the Ohmic density vanishes).
inline double signed_rate(const BathSpec& bath, double omega)
{
    if (omega > 0.0) return rate(bath, omega).down;
    if (omega < 0.0) return rate(bath, -omega).up;
    return 0.0;
}

// One dissipative transition |upper> -> |lower> inside a channel; indices
// refer to the ascending eigenbasis.
struct Transition {
    Eigen::Index lower{0};
    Eigen::Index upper{0};
    cplx amplitude{0.0};  // <lower| S |upper>
};

struct BohrChannel {
    Bath bath{Bath::w};
    double omega{0.0};
    Matrix lowering;  // A_{bath,omega} in the construction basis
    double rate_down{0.0};
    double rate_up{0.0};
    std::vector<Transition> transitions;
};

inline constexpr double kFrequencyMergeTol = 1e-9;
inline constexpr double kAmplitudeTol = 1e-12;

// Eigenoperator decomposition S = sum_w (A_w + A_w^dagger). Transitions of the
// same frequency (relative tolerance kFrequencyMergeTol) share one channel;
// zero-frequency components carry no Ohmic rate and are dropped.
inline std::vector<BohrChannel> bohr_channels(const SystemModel& model, const Eigensystem& es,
                                              const BathSpec& bath_spec)
{
    const BathSpec bath = resolve(bath_spec, model.params);
    const Eigen::Index d = model.dimension;
    const Matrix s_energy = es.basis.adjoint() * model.contacts[bath.label] * es.basis;
    const double span = es.energies.maxCoeff() - es.energies.minCoeff();
    const double tol = kFrequencyMergeTol * std::max(span, 1.0);

    struct Raw {
        double omega;
        Transition t;
    };
    std::vector<Raw> raw;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const double w = es.energies(j) - es.energies(i);
            if (w <= tol) continue;
            const cplx s = s_energy(i, j);
            if (std::abs(s) <= kAmplitudeTol) continue;
            raw.push_back({w, Transition{i, j, s}});
        }
    }
    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.omega < b.omega; });

    std::vector<BohrChannel> channels;
    std::size_t k = 0;
    while (k < raw.size()) {
        std::size_t end = k + 1;
        while (end < raw.size() && raw[end].omega - raw[k].omega < tol) ++end;
        BohrChannel ch;
        ch.bath = bath.label;
        Matrix a_energy = Matrix::Zero(d, d);
        double wsum = 0.0;
        for (std::size_t m = k; m < end; ++m) {
            a_energy(raw[m].t.lower, raw[m].t.upper) += raw[m].t.amplitude;
            ch.transitions.push_back(raw[m].t);
            wsum += raw[m].omega;
        }
        ch.omega = wsum / static_cast<double>(end - k);
        ch.lowering = es.basis * a_energy * es.basis.adjoint();
        const RatePair r = rate(bath, ch.omega);
        ch.rate_down = r.down;
        ch.rate_up = r.up;
        channels.push_back(std::move(ch));
        k = end;
    }
    return channels;
}

inline std::vector<BohrChannel> bohr_channels(const SystemModel& model, const BathSpec& bath)
{
    return bohr_channels(model, eigendecompose(model), bath);
}

// ---------------------------------------------------------------------------
// Superoperators on column-major vectorized density matrices.
// ---------------------------------------------------------------------------

namespace superop {

inline Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

inline Matrix unvec(const Vector& v, Eigen::Index dim) { return Eigen::Map<const Matrix>(v.data(), dim, dim); }

// -i[H, .]
inline Matrix commutator(const Matrix& h)
{
    const Matrix id = Matrix::Identity(h.rows(), h.cols());
    return cplx(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
}

// rate * (A . A^dagger - 1/2 {A^dagger A, .})
inline Matrix lindblad_term(const Matrix& a, double rate)
{
    const Matrix id = Matrix::Identity(a.rows(), a.cols());
    const Matrix ada = a.adjoint() * a;
    return rate * (kron(a.conjugate(), a) - 0.5 * kron(id, ada) - 0.5 * kron(ada.transpose(), id));
}

} // namespace superop

struct Liouvillian {
    Eigen::Index dim{0};
    Matrix hamiltonian;
    Eigensystem eigensystem;
    PerBath<std::vector<BohrChannel>> channels;
    PerBath<Matrix> dissipators;  // d^2 x d^2 each
    Matrix coherent;              // -i[H, .]
    Matrix total;                 // coherent + sum of dissipators
};

inline Matrix dissipator_superoperator(const std::vector<BohrChannel>& channels, Eigen::Index dim)
{
    Matrix l = Matrix::Zero(dim * dim, dim * dim);
    for (const auto& ch : channels) {
        if (ch.rate_down > 0.0) l += superop::lindblad_term(ch.lowering, ch.rate_down);
        if (ch.rate_up > 0.0) l += superop::lindblad_term(ch.lowering.adjoint(), ch.rate_up);
    }
    return l;
}

inline Liouvillian build_liouvillian(const SystemModel& model, const BathSet& baths)
{
    validate(baths);
    Liouvillian l;
    l.dim = model.dimension;
    l.hamiltonian = model.hamiltonian;
    l.eigensystem = eigendecompose(model);
    l.coherent = superop::commutator(model.hamiltonian);
    l.total = l.coherent;
    for (Bath b : kAllBaths) {
        l.channels[b] = bohr_channels(model, l.eigensystem, baths[b]);
        l.dissipators[b] = dissipator_superoperator(l.channels[b], l.dim);
        l.total += l.dissipators[b];
    }
    return l;
}

inline Matrix apply_dissipator(const Liouvillian& l, Bath bath, const Matrix& rho)
{
    if (rho.rows() != l.dim || rho.cols() != l.dim) {
        throw std::invalid_argument("apply_dissipator: state dimension mismatch");
    }
    return superop::unvec(l.dissipators[bath] * superop::vec(rho), l.dim);
}

inline Matrix apply_dissipator(const Liouvillian& l, std::string_view bath_label, const Matrix& rho)
{
    return apply_dissipator(l, bath_from_string(bath_label), rho);
}

inline Matrix apply_total(const Liouvillian& l, const Matrix& rho)
{
    return superop::unvec(l.total * superop::vec(rho), l.dim);
}

} // namespace qchill
