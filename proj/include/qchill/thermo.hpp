// thermo.hpp - non-equilibrium steady state and its thermodynamics

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qchill/core.hpp"
#include "qchill/lindblad.hpp"
#include "qchill/models.hpp"

namespace qchill {

class NonUniqueSteadyState : public SolverError {
public:
    explicit NonUniqueSteadyState(Eigen::Index null_dimension)
        : SolverError("steady state is not unique (null space dimension " +
                      std::to_string(null_dimension) + ")"),
          null_dimension_(null_dimension)
    {
    }

    Eigen::Index null_dimension() const { return null_dimension_; }

private:
    Eigen::Index null_dimension_;
};

struct SteadyState {
    Matrix rho;
    Eigen::Index null_dimension{0};
    double residual{0.0};  // max |(L rho)_ij|
};

inline constexpr double kNullSpaceRelTol = 1e-13;
inline constexpr double kResidualTol = 1e-10;
inline constexpr double kNegativeEigenvalueTol = 1e-10;

inline Eigen::Index null_space_dimension(const Matrix& superoperator)
{
    Eigen::JacobiSVD<Matrix> svd(superoperator);
    const RealVector& sv = svd.singularValues();
    const double cut = kNullSpaceRelTol * std::max(sv(0), 1.0);
    Eigen::Index n = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) <= cut) ++n;
    }
    return n;
}

// Fixed point of L with unit trace. The first (redundant) population equation
// is replaced by the trace constraint; the result is hermitized and tiny
// negative eigenvalues are clipped.
inline SteadyState steady_state(const Liouvillian& l)
{
    const Eigen::Index d = l.dim;
    const Eigen::Index n = d * d;
    SteadyState out;
    out.null_dimension = null_space_dimension(l.total);
    if (out.null_dimension == 0) {
        throw SolverError("generator has no null vector within tolerance");
    }
    if (out.null_dimension > 1) {
        throw NonUniqueSteadyState(out.null_dimension);
    }

    Matrix a = l.total;
    a.row(0).setZero();
    for (Eigen::Index i = 0; i < d; ++i) a(0, i * (d + 1)) = 1.0;
    Vector rhs = Vector::Zero(n);
    rhs(0) = 1.0;
    const Vector x = Eigen::FullPivLU<Matrix>(a).solve(rhs);

    Matrix rho = hermitize(superop::unvec(x, d));
    rho /= rho.trace().real();

    Eigen::SelfAdjointEigenSolver<Matrix> eig(rho);
    const double min_ev = eig.eigenvalues().minCoeff();
    if (min_ev < -kNegativeEigenvalueTol) {
        throw SolverError("steady state is not positive semidefinite (eigenvalue " +
                          std::to_string(min_ev) + ")");
    }
    if (min_ev < 0.0) {
        const RealVector clipped = eig.eigenvalues().cwiseMax(0.0);
        rho = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
        rho = hermitize(rho);
        rho /= rho.trace().real();
    }

    out.rho = rho;
    out.residual = (l.total * superop::vec(rho)).cwiseAbs().maxCoeff();
    if (out.residual > kResidualTol) {
        throw SolverError("steady-state residual " + std::to_string(out.residual) + " exceeds tolerance");
    }
    return out;
}

using Currents = PerBath<double>;

// Q_alpha = tr{H L_alpha rho}; positive when heat flows from the bath into the system.
inline Currents heat_currents(const Liouvillian& l, const Matrix& rho)
{
    Currents q;
    for (Bath b : kAllBaths) {
        q[b] = (l.hamiltonian * apply_dissipator(l, b, rho)).trace().real();
    }
    return q;
}

inline PerBath<double> temperatures(const BathSet& baths)
{
    PerBath<double> t;
    for (Bath b : kAllBaths) t[b] = baths[b].temperature;
    return t;
}

inline double entropy_rate(const Currents& q, const PerBath<double>& temps)
{
    double s = 0.0;
    for (Bath b : kAllBaths) s -= q[b] / temps[b];
    return s;
}

namespace detail {

inline void require_ordered(double t_w, double t_h, double t_c)
{
    if (!(t_c > 0.0) || !(t_h > t_c) || !(t_w >= t_h)) {
        throw std::invalid_argument("temperatures must satisfy T_w >= T_h > T_c > 0");
    }
}

} // namespace detail

// Cold frequency at which the three-level chiller runs reversibly. Returns 0
// when T_w = T_h (no cooling window).
inline double omega_c_rev(double t_w, double t_h, double t_c, double omega_h)
{
    detail::require_ordered(t_w, t_h, t_c);
    return omega_h * t_c * (1.0 - t_h / t_w) / (t_h * (1.0 - t_c / t_w));
}

inline double carnot_cop(double t_w, double t_h, double t_c)
{
    detail::require_ordered(t_w, t_h, t_c);
    return t_c * (1.0 - t_h / t_w) / (t_h - t_c);
}

// Coefficient of performance Q_c / Q_w; absent unless Q_w > floor.
inline std::optional<double> cop(const Currents& q, double floor = 0.0)
{
    if (!(q[Bath::w] > floor)) return std::nullopt;
    return q[Bath::c] / q[Bath::w];
}

// Populations in the conventional state labelling of the model (see
// labeled_eigensystem); ascending-energy populations for the three-qubit model.
inline RealVector labeled_populations(const SystemModel& model, const Eigensystem& es, const Matrix& rho)
{
    if (auto lab = labeled_eigensystem(model)) return populations(*lab, rho);
    return populations(es, rho);
}

using TemperatureMap = std::map<std::string, double>;

namespace detail {

inline void put_temperature(TemperatureMap& out, const std::string& key, double quantum, double p_low,
                            double p_high)
{
    if (!(p_low > 0.0) || !(p_high > 0.0)) return;
    const double tau = -quantum / std::log(p_high / p_low);
    if (std::isfinite(tau)) out[key] = tau;
}

} // namespace detail

// Internal temperatures from labelled populations. Three-level: tau_w, tau_h,
// tau_c. Four-level: tau_*_plus from {p1,p3,p4} and tau_*_minus from
// {p1,p2,p4}. Other models have none. Ratios involving a non-positive
// population are left out.
inline TemperatureMap internal_temperatures(ModelKind kind, const RealVector& p, const ModelParams& params)
{
    TemperatureMap out;
    const double wc = params.omega_c;
    const double wh = params.omega_h;
    const double ww = params.omega_w();
    const double g = params.g;
    switch (kind) {
    case ModelKind::ThreeLevel:
    case ModelKind::ThreeLevelShorted:
        detail::put_temperature(out, "tau_w", ww, p(1), p(2));
        detail::put_temperature(out, "tau_h", wh, p(0), p(2));
        detail::put_temperature(out, "tau_c", wc, p(0), p(1));
        break;
    case ModelKind::FourLevel:
        detail::put_temperature(out, "tau_w_plus", ww - g, p(2), p(3));
        detail::put_temperature(out, "tau_h_plus", wh, p(0), p(3));
        detail::put_temperature(out, "tau_c_plus", wc + g, p(0), p(2));
        detail::put_temperature(out, "tau_w_minus", ww + g, p(1), p(3));
        detail::put_temperature(out, "tau_h_minus", wh, p(0), p(3));
        detail::put_temperature(out, "tau_c_minus", wc - g, p(0), p(1));
        break;
    default:
        break;
    }
    return out;
}

struct SteadyReport {
    ModelKind kind{ModelKind::ThreeLevel};
    ModelParams params;
    Matrix state;
    RealVector energies;              // ascending
    RealVector populations;           // over the ascending eigenbasis
    RealVector labeled_populations;   // conventional labelling
    Currents currents;
    double entropy_rate{0.0};
    std::optional<double> cop;
    bool cooling{false};
    TemperatureMap internal_temps;
    double residual{0.0};
    Eigen::Index null_dimension{1};
};

inline SteadyReport make_report(const SystemModel& model, const BathSet& baths, const Liouvillian& l,
                                const SteadyState& ss)
{
    SteadyReport r;
    r.kind = model.kind;
    r.params = model.params;
    r.state = ss.rho;
    r.energies = l.eigensystem.energies;
    r.populations = populations(l.eigensystem, ss.rho);
    r.labeled_populations = labeled_populations(model, l.eigensystem, ss.rho);
    r.currents = heat_currents(l, ss.rho);
    r.entropy_rate = entropy_rate(r.currents, temperatures(baths));
    r.cop = cop(r.currents);
    r.cooling = r.currents[Bath::c] > 0.0;
    r.internal_temps = internal_temperatures(model.kind, r.labeled_populations, model.params);
    r.residual = ss.residual;
    r.null_dimension = ss.null_dimension;
    return r;
}

inline SteadyReport solve_steady(const SystemModel& model, const BathSet& baths)
{
    const Liouvillian l = build_liouvillian(model, baths);
    return make_report(model, baths, l, steady_state(l));
}

// Natural current scale gamma * (spectral width)^3 used as an absolute floor
// when all currents vanish.
inline double current_scale(const SteadyReport& r, const BathSet& baths)
{
    double gamma = 0.0;
    for (Bath b : kAllBaths) gamma = std::max(gamma, baths[b].gamma);
    const double span = r.energies.maxCoeff() - r.energies.minCoeff();
    return gamma * span * span * span;
}

struct InvariantCheck {
    std::string name;
    bool pass{false};
    double value{0.0};
    double bound{0.0};
};

inline constexpr double kConservationRelTol = 1e-10;
inline constexpr double kConservationAbsFloor = 1e-14;  // times current_scale
inline constexpr double kSecondLawTol = 1e-12;

inline std::vector<InvariantCheck> check_invariants(const SteadyReport& r, const BathSet& baths)
{
    std::vector<InvariantCheck> out;
    double qmax = 0.0;
    double qsum = 0.0;
    for (Bath b : kAllBaths) {
        qmax = std::max(qmax, std::abs(r.currents[b]));
        qsum += r.currents[b];
    }
    const double cons_bound = kConservationRelTol * qmax + kConservationAbsFloor * current_scale(r, baths);
    out.push_back({"current_conservation", std::abs(qsum) <= cons_bound, std::abs(qsum), cons_bound});
    out.push_back({"second_law", r.entropy_rate >= -kSecondLawTol, r.entropy_rate, -kSecondLawTol});
    out.push_back({"steady_residual", r.residual <= kResidualTol, r.residual, kResidualTol});
    const double tr_err = std::abs(r.state.trace() - cplx(1.0));
    out.push_back({"unit_trace", tr_err <= 1e-12, tr_err, 1e-12});
    const double herm_err = (r.state - r.state.adjoint()).cwiseAbs().maxCoeff();
    out.push_back({"hermitian", herm_err <= 1e-12, herm_err, 1e-12});
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r.state, Eigen::EigenvaluesOnly);
    const double min_ev = eig.eigenvalues().minCoeff();
    out.push_back({"positive_semidefinite", min_ev >= -kNegativeEigenvalueTol, min_ev, -kNegativeEigenvalueTol});
    return out;
}

} // namespace qchill
