// stages.hpp - stage decomposition of the four-level chiller and graph
// diagnosis of arbitrary models

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qchill/core.hpp"
#include "qchill/lindblad.hpp"
#include "qchill/models.hpp"
#include "qchill/thermo.hpp"

namespace qchill {

// ---------------------------------------------------------------------------
// Four-level rates
// ---------------------------------------------------------------------------

// Spectral rates Gamma_{alpha, +-omega} of the four-level chiller. "plus" and
// "minus" refer to the quanta w_c + g / w_c - g on the cold side and
// w_w + g / w_w - g on the work side; "dn" is emission into the bath, "up"
// absorption. Frequencies may be negative when w_c < g, in which case the
// signed-rate convention applies.
struct FourLevelRates {
    double h_dn{0}, h_up{0};
    double cp_dn{0}, cp_up{0};  // cold, w_c + g
    double cm_dn{0}, cm_up{0};  // cold, w_c - g
    double wp_dn{0}, wp_up{0};  // work, w_w + g
    double wm_dn{0}, wm_up{0};  // work, w_w - g
};

inline FourLevelRates four_level_rates(const ModelParams& p, const BathSet& baths)
{
    const BathSet b = resolve(baths, p);
    const double wc = p.omega_c, wh = p.omega_h, ww = p.omega_w(), g = p.g;
    FourLevelRates r;
    r.h_dn = signed_rate(b[Bath::h], wh);
    r.h_up = signed_rate(b[Bath::h], -wh);
    r.cp_dn = signed_rate(b[Bath::c], wc + g);
    r.cp_up = signed_rate(b[Bath::c], -(wc + g));
    r.cm_dn = signed_rate(b[Bath::c], wc - g);
    r.cm_up = signed_rate(b[Bath::c], -(wc - g));
    r.wp_dn = signed_rate(b[Bath::w], ww + g);
    r.wp_up = signed_rate(b[Bath::w], -(ww + g));
    r.wm_dn = signed_rate(b[Bath::w], ww - g);
    r.wm_up = signed_rate(b[Bath::w], -(ww - g));
    return r;
}

// Classical population dynamics of the four-level chiller over the labelled
// eigenstates |1>..|4> (energies 0, w_c - g, w_c + g, w_h). Cold and work
// matrix elements are 1/sqrt2, so those rates enter with a factor 1/2.
struct FourLevelRateModel {
    RealVector energies;                  // labelled order
    PerBath<Eigen::Matrix4d> generator;   // generator[b](to, from)
    Eigen::Matrix4d total;
};

inline FourLevelRateModel four_level_rate_model(const ModelParams& p, const FourLevelRates& r)
{
    FourLevelRateModel m;
    m.energies = RealVector(4);
    m.energies << 0.0, p.omega_c - p.g, p.omega_c + p.g, p.omega_h;
    for (Bath b : kAllBaths) m.generator[b].setZero();
    auto link = [&](Bath b, int from, int to, double k) {
        m.generator[b](to, from) += k;
        m.generator[b](from, from) -= k;
    };
    link(Bath::h, 3, 0, r.h_dn);
    link(Bath::h, 0, 3, r.h_up);
    link(Bath::c, 2, 0, 0.5 * r.cp_dn);
    link(Bath::c, 0, 2, 0.5 * r.cp_up);
    link(Bath::c, 1, 0, 0.5 * r.cm_dn);
    link(Bath::c, 0, 1, 0.5 * r.cm_up);
    link(Bath::w, 3, 1, 0.5 * r.wp_dn);
    link(Bath::w, 1, 3, 0.5 * r.wp_up);
    link(Bath::w, 3, 2, 0.5 * r.wm_dn);
    link(Bath::w, 2, 3, 0.5 * r.wm_up);
    m.total = m.generator[Bath::w] + m.generator[Bath::h] + m.generator[Bath::c];
    return m;
}

inline Eigen::Vector4d rate_model_steady_state(const FourLevelRateModel& m)
{
    Eigen::Matrix4d a = m.total;
    a.row(0).setOnes();
    Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
    rhs(0) = 1.0;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(a);
    if (!lu.isInvertible()) throw SolverError("classical rate model has no unique steady state");
    return lu.solve(rhs);
}

inline Currents rate_model_currents(const FourLevelRateModel& m, const Eigen::Vector4d& p)
{
    Currents q;
    for (Bath b : kAllBaths) {
        const Eigen::Vector4d dp = m.generator[b] * p;
        q[b] = m.energies.dot(dp);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Stage breakdown
// ---------------------------------------------------------------------------

enum class Stage { plus = 0, minus = 1, leak = 2 };

inline constexpr std::array<Stage, 3> kAllStages{Stage::plus, Stage::minus, Stage::leak};

inline std::string_view to_string(Stage s)
{
    switch (s) {
    case Stage::plus: return "plus";
    case Stage::minus: return "minus";
    case Stage::leak: return "leak";
    }
    return "?";
}

// How cycle brackets are combined with exit-rate prefactors: each bracket with
// the exit rate of the state off its own cycle (matched) or of the other
// cycle (crossed). Decided numerically against the rate-equation currents.
enum class Pairing { crossed, matched };

inline std::string_view to_string(Pairing p) { return p == Pairing::matched ? "matched" : "crossed"; }

struct Interval {
    double lo{0.0};
    double hi{0.0};

    bool empty() const { return !(hi > lo); }
    bool contains(double x) const { return x > lo && x < hi; }
};

struct CoolingWindows {
    Interval plus;   // carries (w_c + g, w_w - g)
    Interval minus;  // carries (w_c - g, w_w + g)
    bool plus_empty{false};
};

inline CoolingWindows cooling_windows(double omega_c_rev, double g)
{
    if (!(omega_c_rev > 0.0)) throw std::invalid_argument("cooling_windows: omega_c_rev must be positive");
    if (!(g >= 0.0)) throw std::invalid_argument("cooling_windows: g must be non-negative");
    CoolingWindows w;
    w.plus = {0.0, std::max(0.0, omega_c_rev - g)};
    w.minus = {g, omega_c_rev + g};
    w.plus_empty = w.plus.empty();
    return w;
}

struct StageBreakdown {
    ModelParams params;
    FourLevelRates rates;
    double i_plus{0.0};
    double i_minus{0.0};
    double i_leak{0.0};
    double d_norm{0.0};          // -1/2 det of the normalization matrix
    double d_tree{0.0};          // 8 x spanning-tree normalization of the rate model
    Pairing pairing{Pairing::matched};
    std::array<Currents, 3> stage_currents{};
    std::array<double, 3> stage_entropy{};
    Currents reference;          // rate-equation currents used to fix the pairing
    std::optional<CoolingWindows> windows;

    const Currents& currents(Stage s) const { return stage_currents[static_cast<std::size_t>(s)]; }
    double entropy(Stage s) const { return stage_entropy[static_cast<std::size_t>(s)]; }

    Currents summed() const
    {
        Currents q;
        for (Bath b : kAllBaths) {
            q[b] = 0.0;
            for (const auto& sc : stage_currents) q[b] += sc[b];
        }
        return q;
    }
};

inline double normalization_determinant(const FourLevelRates& r)
{
    Eigen::Matrix4d m;
    m << 2.0, 2.0, 2.0, 2.0,
        r.cm_up, -(r.cm_dn + r.wp_up), 0.0, r.wp_dn,
        r.cp_up, 0.0, -(r.cp_dn + r.wm_up), r.wm_dn,
        2.0 * r.h_up, r.wp_up, r.wm_up, -2.0 * r.h_dn - r.wp_dn - r.wm_dn;
    return -0.5 * m.determinant();
}

// Sum of spanning-tree weights of the rate graph: -det of the generator with
// its first row replaced by ones.
inline double spanning_tree_normalization(const FourLevelRateModel& m)
{
    Eigen::Matrix4d a = m.total;
    a.row(0).setOnes();
    return -a.determinant();
}

namespace detail {

inline std::array<Currents, 3> stage_currents_from(const ModelParams& p, double ip, double im, double il)
{
    const double wc = p.omega_c, wh = p.omega_h, ww = p.omega_w(), g = p.g;
    std::array<Currents, 3> s{};
    s[0][Bath::w] = (ww - g) * ip;
    s[0][Bath::h] = -wh * ip;
    s[0][Bath::c] = (wc + g) * ip;
    s[1][Bath::w] = (ww + g) * im;
    s[1][Bath::h] = -wh * im;
    s[1][Bath::c] = (wc - g) * im;
    s[2][Bath::w] = -g * il;
    s[2][Bath::h] = 0.0;
    s[2][Bath::c] = g * il;
    return s;
}

// max_alpha |Q_alpha - sum of stage currents| relative to max |Q_alpha|, or
// relative to the largest stage current when include_stages is set (useful
// where the stages nearly cancel).
inline double identity_error(const std::array<Currents, 3>& s, const Currents& ref, bool include_stages = false,
                             double floor = 0.0)
{
    double err = 0.0;
    double scale = floor;
    for (Bath b : kAllBaths) {
        err = std::max(err, std::abs(ref[b] - (s[0][b] + s[1][b] + s[2][b])));
        scale = std::max(scale, std::abs(ref[b]));
        if (include_stages) {
            for (const auto& q : s) scale = std::max(scale, std::abs(q[b]));
        }
    }
    return scale > 0.0 ? err / scale : err;
}

} // namespace detail

inline constexpr double kNormalizationTol = 1e-300;
inline constexpr double kPairingTol = 1e-8;

// Stage rates of the four-level chiller from its spectral rates.
inline StageBreakdown stage_rates(const ModelParams& p, const FourLevelRates& r)
{
    StageBreakdown out;
    out.params = p;
    out.rates = r;
    out.d_norm = normalization_determinant(r);
    const FourLevelRateModel rm = four_level_rate_model(p, r);
    out.d_tree = 8.0 * spanning_tree_normalization(rm);
    if (!(out.d_norm > kNormalizationTol)) {
        throw SolverError("stage normalization D is not positive; rates vanish");
    }
    const double d = out.d_norm;

    // Cycle brackets: forward minus backward three-bath products.
    const double bracket_p = r.cp_up * r.wm_up * r.h_dn - r.cp_dn * r.wm_dn * r.h_up;
    const double bracket_m = r.cm_up * r.wp_up * r.h_dn - r.cm_dn * r.wp_dn * r.h_up;
    // Exit rates of the state not on each cycle.
    const double exit_2 = r.cm_dn + r.wp_up;
    const double exit_3 = r.cp_dn + r.wm_up;
    const double leak = (r.cp_up * r.cm_dn * r.wp_dn * r.wm_up - r.cp_dn * r.cm_up * r.wp_up * r.wm_dn) / d;

    out.reference = rate_model_currents(rm, rate_model_steady_state(rm));
    out.i_leak = leak;

    const auto matched = detail::stage_currents_from(p, exit_2 * bracket_p / d, exit_3 * bracket_m / d, leak);
    const auto crossed = detail::stage_currents_from(p, exit_3 * bracket_m / d, exit_2 * bracket_p / d, leak);
    // Near reversible points the brackets cancel; compare against the gross
    // (one-directional) cycle currents instead.
    const double gross = p.omega_h / d *
                         std::max({exit_2 * r.cp_up * r.wm_up * r.h_dn, exit_2 * r.cp_dn * r.wm_dn * r.h_up,
                                   exit_3 * r.cm_up * r.wp_up * r.h_dn, exit_3 * r.cm_dn * r.wp_dn * r.h_up});
    const double err_matched = detail::identity_error(matched, out.reference, true, gross);
    const double err_crossed = detail::identity_error(crossed, out.reference, true, gross);
    if (err_matched <= err_crossed) {
        out.pairing = Pairing::matched;
        out.i_plus = exit_2 * bracket_p / d;
        out.i_minus = exit_3 * bracket_m / d;
        out.stage_currents = matched;
    } else {
        out.pairing = Pairing::crossed;
        out.i_plus = exit_3 * bracket_m / d;
        out.i_minus = exit_2 * bracket_p / d;
        out.stage_currents = crossed;
    }
    if (std::min(err_matched, err_crossed) > kPairingTol) {
        throw InvariantViolation("no bracket assignment reproduces the rate-equation currents at omega_c = " +
                                 std::to_string(p.omega_c) + " (relative errors " + std::to_string(err_matched) +
                                 ", " + std::to_string(err_crossed) + ")");
    }
    return out;
}

inline void stage_entropies(StageBreakdown& s, const PerBath<double>& temps)
{
    for (std::size_t k = 0; k < 3; ++k) s.stage_entropy[k] = entropy_rate(s.stage_currents[k], temps);
}

inline StageBreakdown stage_breakdown(const ModelParams& p, const BathSet& baths)
{
    StageBreakdown s = stage_rates(p, four_level_rates(p, baths));
    const auto t = temperatures(baths);
    stage_entropies(s, t);
    if (t[Bath::w] > t[Bath::h] && t[Bath::h] > t[Bath::c]) {
        s.windows = cooling_windows(omega_c_rev(t[Bath::w], t[Bath::h], t[Bath::c], p.omega_h), p.g);
    }
    return s;
}

inline StageBreakdown stage_breakdown(const SystemModel& model, const BathSet& baths)
{
    if (model.kind != ModelKind::FourLevel) {
        throw std::invalid_argument("stage breakdown is defined for the four_level model only");
    }
    return stage_breakdown(model.params, baths);
}

// Triple-product imbalances of the two three-bath cycles: true when the
// cooling direction (cold -> work -> hot) outweighs its reverse.
struct Imbalance {
    bool plus_cools{false};   // quanta (w_c + g, w_w - g)
    bool minus_cools{false};  // quanta (w_c - g, w_w + g)
    double plus_margin{0.0};
    double minus_margin{0.0};
};

inline Imbalance imbalance_check(const FourLevelRates& r)
{
    Imbalance im;
    im.plus_margin = r.cp_up * r.wm_up * r.h_dn - r.cp_dn * r.wm_dn * r.h_up;
    im.minus_margin = r.cm_up * r.wp_up * r.h_dn - r.cm_dn * r.wp_dn * r.h_up;
    im.plus_cools = im.plus_margin > 0.0;
    im.minus_cools = im.minus_margin > 0.0;
    return im;
}

// ---------------------------------------------------------------------------
// Breakdown verification over an omega_c grid
// ---------------------------------------------------------------------------

struct BreakdownRow {
    double omega_c{0.0};
    StageBreakdown stages;
    Currents total;           // reference currents (Liouvillian, or rate equation at g = 0)
    double total_entropy{0.0};
    double relative_error{0.0};
    bool signs_ok{true};
};

struct BreakdownVerification {
    std::vector<BreakdownRow> rows;
    double max_relative_error{0.0};
    bool signs_ok{true};
    bool entropy_ok{true};
    bool leak_sign_ok{true};
    Pairing pairing{Pairing::matched};
};

inline constexpr double kBreakdownTol = 1e-10;

namespace detail {

inline bool stage_sign_ok(double qc, const Interval& window, double x, double tol, double margin)
{
    if (window.contains(x) && x - window.lo > margin && window.hi - x > margin) return qc >= -tol;
    if (!window.contains(x) && std::abs(x - window.lo) > margin && std::abs(x - window.hi) > margin) return qc <= tol;
    return true;
}

} // namespace detail

// Checks Q_alpha = sum of stage currents on every grid point. At g = 0 the
// secular generator merges the degenerate cold and work channels, so the
// reference is the classical rate equation (the g -> 0+ limit).
inline BreakdownVerification verify_breakdown(const ModelParams& base, const BathSet& baths,
                                              const std::vector<double>& omega_c_grid)
{
    BreakdownVerification v;
    const auto temps = temperatures(baths);
    for (double wc : omega_c_grid) {
        ModelParams p = base;
        p.omega_c = wc;
        BreakdownRow row;
        row.omega_c = wc;
        row.stages = stage_breakdown(p, baths);
        if (p.g > 0.0) {
            row.total = solve_steady(build_four_level(p.omega_c, p.omega_h, p.g), baths).currents;
        } else {
            row.total = row.stages.reference;
        }
        row.total_entropy = entropy_rate(row.total, temps);
        row.relative_error = detail::identity_error(row.stages.stage_currents, row.total);
        v.pairing = row.stages.pairing;

        double scale = 0.0;
        for (Bath b : kAllBaths) scale = std::max(scale, std::abs(row.total[b]));
        const double tol = 1e-12 * scale + 1e-18;
        if (row.stages.windows) {
            const double margin = 1e-9 * p.omega_h;
            row.signs_ok = detail::stage_sign_ok(row.stages.currents(Stage::plus)[Bath::c],
                                                 row.stages.windows->plus, wc, tol, margin) &&
                           detail::stage_sign_ok(row.stages.currents(Stage::minus)[Bath::c],
                                                 row.stages.windows->minus, wc, tol, margin);
        }
        for (Stage s : kAllStages) {
            if (row.stages.entropy(s) < -kSecondLawTol) v.entropy_ok = false;
        }
        if (temps[Bath::w] > temps[Bath::c] && row.stages.i_leak > 0.0) v.leak_sign_ok = false;
        v.signs_ok = v.signs_ok && row.signs_ok;
        v.max_relative_error = std::max(v.max_relative_error, row.relative_error);
        if (row.relative_error > kBreakdownTol) {
            throw InvariantViolation("stage currents do not add up to the steady-state currents at omega_c = " +
                                     std::to_string(wc) + " (relative error " +
                                     std::to_string(row.relative_error) + ")");
        }
        v.rows.push_back(std::move(row));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Graph diagnosis
// ---------------------------------------------------------------------------

struct GraphEdge {
    Bath bath{Bath::w};
    double omega{0.0};
    Eigen::Index lower{0};
    Eigen::Index upper{0};
    std::size_t channel{0};  // index into DiagnosisReport::channels
};

struct ChannelSummary {
    Bath bath{Bath::w};
    double omega{0.0};
    double rate_down{0.0};
    double rate_up{0.0};
    std::size_t transitions{0};
};

struct StageRealization {
    std::array<Eigen::Index, 3> states{};  // ascending eigenstate indices
    std::array<std::size_t, 3> edges{};    // edge indices for w, h, c
};

struct StageClass {
    PerBath<double> quanta;
    std::vector<StageRealization> realizations;
};

struct LeakDirection {
    Bath from{Bath::w};
    Bath to{Bath::c};

    auto operator<=>(const LeakDirection&) const = default;
};

struct StagePair {
    std::size_t first{0};
    std::size_t second{0};
    Bath shared{Bath::h};
    ModelKind configuration{ModelKind::FourLevel};
    std::optional<LeakDirection> leak;
};

struct LeakLoop {
    std::array<Eigen::Index, 4> states{};  // in cyclic order
    Bath source{Bath::w};                  // bath giving energy in the listed orientation
    Bath sink{Bath::c};
    double quantum{0.0};                   // energy moved per loop
};

struct DiagnosisReport {
    ModelKind kind{ModelKind::ThreeLevel};
    RealVector energies;
    std::vector<ChannelSummary> channels;
    std::vector<GraphEdge> transitions;
    std::vector<GraphEdge> suppressed;  // transitions whose channel rate vanishes
    PerBath<std::vector<double>> per_bath_frequencies;
    std::vector<StageClass> stages;
    std::vector<StagePair> stage_pairs;
    std::set<LeakDirection> leak_directions;
    std::vector<LeakLoop> leak_loops;
    std::vector<std::size_t> dangling;  // edge indices not on any cycle of length <= 4
    std::size_t cycles_enumerated{0};
    bool endoreversible{false};

    std::size_t realization_count() const
    {
        std::size_t n = 0;
        for (const auto& s : stages) n += s.realizations.size();
        return n;
    }
};

inline ModelKind configuration_for_shared_bath(Bath shared)
{
    switch (shared) {
    case Bath::h: return ModelKind::FourLevel;
    case Bath::c: return ModelKind::FourLevelPrime;
    case Bath::w: return ModelKind::FourLevelDoublePrime;
    }
    return ModelKind::FourLevel;
}

namespace detail {

inline bool touches(const GraphEdge& e, Eigen::Index a, Eigen::Index b)
{
    return (e.lower == a && e.upper == b) || (e.lower == b && e.upper == a);
}

inline std::vector<std::size_t> edges_between(const std::vector<GraphEdge>& edges, Eigen::Index a, Eigen::Index b)
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (touches(edges[k], a, b)) out.push_back(k);
    }
    return out;
}

// Energy gained by the system per bath when traversing the vertex cycle in
// the given order along the chosen edges.
inline PerBath<double> cycle_energy(const std::vector<GraphEdge>& edges, const RealVector& e,
                                    const std::vector<Eigen::Index>& verts, const std::vector<std::size_t>& path)
{
    PerBath<double> net{};
    for (std::size_t k = 0; k < verts.size(); ++k) {
        const auto from = verts[k];
        const auto to = verts[(k + 1) % verts.size()];
        net[edges[path[k]].bath] += e(to) - e(from);
    }
    return net;
}

} // namespace detail

// Groups the dissipative transitions of a model into three-bath stages,
// pairs detuned stages into four-level configurations and predicts the
// direction of the resulting heat leaks.
inline DiagnosisReport diagnose(const SystemModel& model, const BathSet& baths)
{
    validate(baths);
    DiagnosisReport rep;
    rep.kind = model.kind;
    const Eigensystem es = eigendecompose(model);
    rep.energies = es.energies;
    const double span = es.energies.maxCoeff() - es.energies.minCoeff();
    const double ftol = 1e-9 * std::max(span, 1.0);
    const auto temps = temperatures(baths);

    for (Bath b : kAllBaths) {
        for (const auto& ch : bohr_channels(model, es, baths[b])) {
            const bool active = ch.rate_down > 0.0 || ch.rate_up > 0.0;
            const std::size_t idx = rep.channels.size();
            rep.channels.push_back({b, ch.omega, ch.rate_down, ch.rate_up, ch.transitions.size()});
            for (const auto& t : ch.transitions) {
                GraphEdge e{b, ch.omega, t.lower, t.upper, idx};
                if (active) {
                    rep.transitions.push_back(e);
                    rep.per_bath_frequencies[b].push_back(ch.omega);
                } else {
                    rep.suppressed.push_back(e);
                }
            }
        }
        std::sort(rep.per_bath_frequencies[b].begin(), rep.per_bath_frequencies[b].end());
    }
    const auto& edges = rep.transitions;
    const Eigen::Index d = model.dimension;
    std::vector<bool> on_cycle(edges.size(), false);

    // Three-cycles.
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            for (Eigen::Index k = j + 1; k < d; ++k) {
                for (auto e1 : detail::edges_between(edges, i, j)) {
                    for (auto e2 : detail::edges_between(edges, j, k)) {
                        for (auto e3 : detail::edges_between(edges, i, k)) {
                            ++rep.cycles_enumerated;
                            on_cycle[e1] = on_cycle[e2] = on_cycle[e3] = true;
                            std::set<Bath> bs{edges[e1].bath, edges[e2].bath, edges[e3].bath};
                            if (bs.size() != 3) continue;
                            StageRealization r;
                            r.states = {i, j, k};
                            for (auto e : {e1, e2, e3}) r.edges[index(edges[e].bath)] = e;
                            PerBath<double> q;
                            for (Bath b : kAllBaths) q[b] = edges[r.edges[index(b)]].omega;
                            auto it = std::find_if(rep.stages.begin(), rep.stages.end(), [&](const StageClass& s) {
                                for (Bath b : kAllBaths) {
                                    if (std::abs(s.quanta[b] - q[b]) > ftol) return false;
                                }
                                return true;
                            });
                            if (it == rep.stages.end()) {
                                rep.stages.push_back({q, {}});
                                it = std::prev(rep.stages.end());
                            }
                            it->realizations.push_back(r);
                        }
                    }
                }
            }
        }
    }

    // Four-cycles: each vertex set has three distinct cyclic orders.
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = a + 1; b < d; ++b) {
            for (Eigen::Index c = b + 1; c < d; ++c) {
                for (Eigen::Index x = c + 1; x < d; ++x) {
                    const std::array<std::vector<Eigen::Index>, 3> orders{
                        std::vector<Eigen::Index>{a, b, c, x}, std::vector<Eigen::Index>{a, b, x, c},
                        std::vector<Eigen::Index>{a, c, b, x}};
                    for (const auto& vs : orders) {
                        const auto s0 = detail::edges_between(edges, vs[0], vs[1]);
                        const auto s1 = detail::edges_between(edges, vs[1], vs[2]);
                        const auto s2 = detail::edges_between(edges, vs[2], vs[3]);
                        const auto s3 = detail::edges_between(edges, vs[3], vs[0]);
                        for (auto e0 : s0) {
                            for (auto e1 : s1) {
                                for (auto e2 : s2) {
                                    for (auto e3 : s3) {
                                        ++rep.cycles_enumerated;
                                        on_cycle[e0] = on_cycle[e1] = on_cycle[e2] = on_cycle[e3] = true;
                                        const std::vector<std::size_t> path{e0, e1, e2, e3};
                                        std::set<Bath> bs;
                                        for (auto e : path) bs.insert(edges[e].bath);
                                        if (bs.size() != 2) continue;
                                        const auto net = detail::cycle_energy(edges, rep.energies, vs, path);
                                        LeakLoop loop;
                                        loop.states = {vs[0], vs[1], vs[2], vs[3]};
                                        bool leaks = false;
                                        for (Bath bb : bs) {
                                            if (net[bb] > ftol) {
                                                loop.source = bb;
                                                loop.quantum = net[bb];
                                                leaks = true;
                                            } else if (net[bb] < -ftol) {
                                                loop.sink = bb;
                                            }
                                        }
                                        if (leaks) rep.leak_loops.push_back(loop);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (!on_cycle[k]) rep.dangling.push_back(k);
    }

    // Pair stages that agree on exactly one bath quantum and share that edge.
    for (std::size_t s = 0; s < rep.stages.size(); ++s) {
        for (std::size_t t = s + 1; t < rep.stages.size(); ++t) {
            std::vector<Bath> same;
            for (Bath b : kAllBaths) {
                if (std::abs(rep.stages[s].quanta[b] - rep.stages[t].quanta[b]) <= ftol) same.push_back(b);
            }
            if (same.size() != 1) continue;
            const Bath shared = same.front();
            bool share_edge = false;
            for (const auto& r1 : rep.stages[s].realizations) {
                for (const auto& r2 : rep.stages[t].realizations) {
                    if (r1.edges[index(shared)] == r2.edges[index(shared)]) share_edge = true;
                }
            }
            if (!share_edge) continue;
            StagePair pair{s, t, shared, configuration_for_shared_bath(shared), std::nullopt};
            std::vector<Bath> split;
            for (Bath b : kAllBaths) {
                if (b != shared) split.push_back(b);
            }
            const Bath x = split[0], y = split[1];
            if (temps[x] > temps[y]) pair.leak = LeakDirection{x, y};
            if (temps[y] > temps[x]) pair.leak = LeakDirection{y, x};
            if (pair.leak) rep.leak_directions.insert(*pair.leak);
            rep.stage_pairs.push_back(pair);
        }
    }
    rep.endoreversible = !rep.stages.empty() && rep.stage_pairs.empty() && rep.leak_loops.empty();
    return rep;
}

} // namespace qchill
