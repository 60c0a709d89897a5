// sweep.hpp - characteristic curves, entropy-share scans and the cooling
// power optimum

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qchill/core.hpp"
#include "qchill/models.hpp"
#include "qchill/parallel.hpp"
#include "qchill/stages.hpp"
#include "qchill/thermo.hpp"

namespace qchill {

struct StageShares {
    double plus{0.0};
    double minus{0.0};
    double leak{0.0};
};

struct SweepRow {
    double omega_c{0.0};
    Currents currents{};
    std::optional<double> cop;
    double entropy_rate{0.0};
    std::optional<StageShares> shares;  // four-level only
    bool cooling{false};
    std::string error;                  // non-empty when the point could not be solved
    Eigen::Index null_dimension{1};

    bool ok() const { return error.empty(); }
};

// COP is reported only when Q_w exceeds this fraction of gamma_w * omega_h^3.
// Below it the ratio is dominated by round-off in the steady-state currents.
inline constexpr double kCopFloor = 1e-9;

inline std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    if (n == 0) return {};
    if (n == 1) return {0.5 * (lo + hi)};
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return x;
}

inline double cop_floor(const ModelParams& p, const BathSet& baths)
{
    return kCopFloor * baths[Bath::w].gamma * p.omega_h * p.omega_h * p.omega_h;
}

inline SweepRow sweep_point(ModelKind kind, ModelParams p, const BathSet& baths, double omega_c)
{
    SweepRow row;
    row.omega_c = omega_c;
    p.omega_c = omega_c;
    try {
        const SteadyReport r = solve_steady(build_model(kind, p), baths);
        row.currents = r.currents;
        row.entropy_rate = r.entropy_rate;
        row.cop = cop(r.currents, cop_floor(p, baths));
        row.cooling = r.cooling;
        row.null_dimension = r.null_dimension;
        if (kind == ModelKind::FourLevel) {
            const StageBreakdown s = stage_breakdown(p, baths);
            row.shares = StageShares{s.entropy(Stage::plus), s.entropy(Stage::minus), s.entropy(Stage::leak)};
        }
    } catch (const NonUniqueSteadyState& e) {
        row.null_dimension = e.null_dimension();
        row.error = e.what();
    } catch (const SolverError& e) {
        row.error = e.what();
    }
    return row;
}

inline std::vector<SweepRow> sweep_points(ModelKind kind, const ModelParams& p, const BathSet& baths,
                                          std::vector<double> omegas)
{
    std::sort(omegas.begin(), omegas.end());
    omegas.erase(std::unique(omegas.begin(), omegas.end()), omegas.end());
    for (double w : omegas) {
        if (!(w > 0.0) || !(w < p.omega_h)) throw std::invalid_argument("sweep: omega_c must lie in (0, omega_h)");
    }
    std::vector<SweepRow> rows(omegas.size());
    parallel_for(omegas.size(), [&](std::size_t k) { rows[k] = sweep_point(kind, p, baths, omegas[k]); });
    return rows;
}

// Uniform sweep of omega_c over [lo, hi].
inline std::vector<SweepRow> sweep_characteristic(ModelKind kind, const ModelParams& p, const BathSet& baths,
                                                  double lo, double hi, std::size_t n_points)
{
    if (!(lo < hi)) throw std::invalid_argument("sweep: empty omega_c range");
    if (n_points < 2) throw std::invalid_argument("sweep: need at least two points");
    return sweep_points(kind, p, baths, linspace(lo, hi, n_points));
}

inline double cooling_power(ModelKind kind, ModelParams p, const BathSet& baths, double omega_c)
{
    p.omega_c = omega_c;
    return solve_steady(build_model(kind, p), baths).currents[Bath::c];
}

// Bisection for a sign change of f between a and b (f(a), f(b) of opposite sign).
inline double bisect_root(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12)
{
    double fa = f(a);
    for (int it = 0; it < 200 && std::abs(b - a) > rel_tol * std::max(std::abs(a), std::abs(b)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

struct CoolingEdges {
    std::optional<double> lower;  // first omega_c where cooling starts
    std::optional<double> upper;  // where it stops
};

// Locates the ends of the cooling interval on a sweep by bisecting the sign
// change of Q_c between neighbouring rows.
inline CoolingEdges cooling_edges(ModelKind kind, const ModelParams& p, const BathSet& baths,
                                  const std::vector<SweepRow>& rows)
{
    CoolingEdges e;
    auto qc = [&](double w) { return cooling_power(kind, p, baths, w); };
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        if (!rows[k].ok() || !rows[k + 1].ok()) continue;
        const bool a = rows[k].cooling;
        const bool b = rows[k + 1].cooling;
        if (!a && b && !e.lower) e.lower = bisect_root(qc, rows[k].omega_c, rows[k + 1].omega_c);
        if (a && !b) e.upper = bisect_root(qc, rows[k].omega_c, rows[k + 1].omega_c);
    }
    return e;
}

// Characteristic curve: uniform sweep plus points accumulating geometrically
// on the cooling edges, where the COP reaches its extreme values.
inline std::vector<SweepRow> characteristic_curve(ModelKind kind, const ModelParams& p, const BathSet& baths,
                                                  double lo, double hi, std::size_t n_points,
                                                  std::size_t edge_points = 12)
{
    auto rows = sweep_characteristic(kind, p, baths, lo, hi, n_points);
    const CoolingEdges e = cooling_edges(kind, p, baths, rows);
    const double step = (hi - lo) / static_cast<double>(n_points - 1);
    std::vector<double> extra;
    for (std::size_t k = 0; k < edge_points; ++k) {
        const double delta = step * std::pow(10.0, -static_cast<double>(k) * 6.0 / static_cast<double>(edge_points));
        if (e.lower) extra.push_back(*e.lower + delta);
        if (e.upper) extra.push_back(*e.upper - delta);
    }
    std::vector<double> grid;
    for (const auto& r : rows) grid.push_back(r.omega_c);
    for (double x : extra) {
        if (x > lo && x < hi) grid.push_back(x);
    }
    return sweep_points(kind, p, baths, grid);
}

struct ShareRow {
    double omega_c{0.0};
    double plus{0.0};
    double minus{0.0};
    double leak{0.0};
    double total{0.0};  // from the Liouvillian steady state
};

// Per-stage entropy production of the four-level chiller across omega_c.
inline std::vector<ShareRow> entropy_share_scan(const ModelParams& p, const BathSet& baths, double lo, double hi,
                                                std::size_t n_points)
{
    const auto grid = linspace(lo, hi, n_points);
    std::vector<ShareRow> rows(grid.size());
    const auto temps = temperatures(baths);
    parallel_for(grid.size(), [&](std::size_t k) {
        ModelParams q = p;
        q.omega_c = grid[k];
        const StageBreakdown s = stage_breakdown(q, baths);
        ShareRow& r = rows[k];
        r.omega_c = grid[k];
        r.plus = s.entropy(Stage::plus);
        r.minus = s.entropy(Stage::minus);
        r.leak = s.entropy(Stage::leak);
        r.total = q.g > 0.0 ? solve_steady(build_four_level(q.omega_c, q.omega_h, q.g), baths).entropy_rate
                            : entropy_rate(s.reference, temps);
    });
    return rows;
}

// Golden-section maximization of f on [a, b].
inline double golden_max(const std::function<double(double)>& f, double a, double b, double rel_tol)
{
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > rel_tol * std::max(std::abs(a), std::abs(b))) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

inline constexpr std::size_t kDefaultCoarsePoints = 64;
inline constexpr double kOptimizerRelTol = 1e-6;

struct GridMax {
    double x{0.0};
    double value{0.0};
    double coarse_max{0.0};
};

// Coarse grid then golden-section refinement around the best grid point.
inline GridMax maximize_on_grid(const std::function<double(double)>& f, double lo, double hi, std::size_t n)
{
    const auto grid = linspace(lo, hi, n);
    std::vector<double> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) { vals[k] = f(grid[k]); });
    const auto best = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    const double a = grid[best == 0 ? 0 : best - 1];
    const double b = grid[std::min(best + 1, grid.size() - 1)];
    const double x = golden_max(f, a, b, kOptimizerRelTol);
    const double fx = f(x);
    if (fx >= vals[best]) return {x, fx, vals[best]};
    return {grid[best], vals[best], vals[best]};
}

struct OptimumReport {
    ModelKind kind{ModelKind::FourLevel};
    double omega_c_star{0.0};
    double qc_max{0.0};
    double epsilon_star{0.0};
    double carnot{0.0};
    double bound{0.0};  // 3/4 of the Carnot COP
    bool bound_satisfied{false};
    double coarse_max{0.0};
    // Four-level only.
    std::optional<double> omega_c_star_plus;
    std::optional<double> omega_c_star_minus;
    std::optional<double> epsilon_mixture;  // Q_w-weighted stage COPs at omega_c_star
    std::optional<double> epsilon_plus_at_star;
    std::optional<double> epsilon_minus_at_star;
};

inline OptimumReport optimize_cooling(ModelKind kind, const ModelParams& p, const BathSet& baths, double lo,
                                      double hi, std::size_t n_coarse = kDefaultCoarsePoints)
{
    if (!(lo > 0.0) || !(hi < p.omega_h) || !(lo < hi)) {
        throw std::invalid_argument("optimize: omega_c bounds must satisfy 0 < lo < hi < omega_h");
    }
    const auto t = temperatures(baths);
    OptimumReport rep;
    rep.kind = kind;
    rep.carnot = carnot_cop(t[Bath::w], t[Bath::h], t[Bath::c]);
    rep.bound = 0.75 * rep.carnot;

    auto qc = [&](double w) { return cooling_power(kind, p, baths, w); };
    const GridMax m = maximize_on_grid(qc, lo, hi, n_coarse);
    if (!(m.coarse_max > 0.0)) throw std::invalid_argument("optimize: no cooling within the omega_c bounds");
    const double x = m.x;
    rep.coarse_max = m.coarse_max;
    rep.omega_c_star = x;
    rep.qc_max = m.value;

    ModelParams q = p;
    q.omega_c = x;
    const SteadyReport r = solve_steady(build_model(kind, q), baths);
    if (!(r.currents[Bath::w] > 0.0)) throw SolverError("optimize: no positive work-bath input at the optimum");
    rep.epsilon_star = r.currents[Bath::c] / r.currents[Bath::w];
    rep.bound_satisfied = rep.epsilon_star <= rep.bound;

    if (kind == ModelKind::FourLevel) {
        auto stage_qc = [&](Stage st) {
            return [&, st](double w) {
                ModelParams s = p;
                s.omega_c = w;
                return stage_breakdown(s, baths).currents(st)[Bath::c];
            };
        };
        rep.omega_c_star_plus = maximize_on_grid(stage_qc(Stage::plus), lo, hi, n_coarse).x;
        rep.omega_c_star_minus = maximize_on_grid(stage_qc(Stage::minus), lo, hi, n_coarse).x;
        const StageBreakdown s = stage_breakdown(q, baths);
        const double ww = q.omega_w();
        const double ep = (x + q.g) / (ww - q.g);
        const double em = (x - q.g) / (ww + q.g);
        rep.epsilon_plus_at_star = ep;
        rep.epsilon_minus_at_star = em;
        const double qw = r.currents[Bath::w];
        rep.epsilon_mixture = s.currents(Stage::plus)[Bath::w] / qw * ep + s.currents(Stage::minus)[Bath::w] / qw * em;
    }
    return rep;
}

struct BoundCheck {
    bool satisfied{false};
    double margin{0.0};  // bound - epsilon_star
};

inline BoundCheck bound_check(const OptimumReport& r) { return {r.epsilon_star <= r.bound, r.bound - r.epsilon_star}; }

} // namespace qchill
