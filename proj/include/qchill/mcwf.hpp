// mcwf.hpp - quantum-jump trajectories of population-closed models, cycle
// classification by loop erasure, and ensemble current estimates

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qchill/core.hpp"
#include "qchill/lindblad.hpp"
#include "qchill/models.hpp"
#include "qchill/parallel.hpp"
#include "qchill/thermo.hpp"

namespace qchill {

struct JumpEvent {
    double time{0.0};
    Eigen::Index from_state{0};  // ascending eigenbasis
    Eigen::Index to_state{0};
    Bath bath{Bath::w};
    double quantum{0.0};  // E(to) - E(from): energy gained by the system
};

enum class CycleTag { C1 = 0, C2, C3, C4, C5, C6, other };

inline constexpr std::size_t kCycleTagCount = 7;

inline std::string_view to_string(CycleTag t)
{
    static constexpr std::array<std::string_view, kCycleTagCount> names{"C1", "C2", "C3", "C4", "C5", "C6", "other"};
    return names[static_cast<std::size_t>(t)];
}

struct CycleTally {
    std::array<std::uint64_t, kCycleTagCount> counts{};
    double total_time{0.0};

    std::uint64_t operator[](CycleTag t) const { return counts[static_cast<std::size_t>(t)]; }
    std::uint64_t& operator[](CycleTag t) { return counts[static_cast<std::size_t>(t)]; }

    CycleTally& operator+=(const CycleTally& o)
    {
        for (std::size_t k = 0; k < kCycleTagCount; ++k) counts[k] += o.counts[k];
        total_time += o.total_time;
        return *this;
    }
};

// One directed jump channel of the classical process.
struct JumpChannel {
    Eigen::Index from{0};
    Eigen::Index to{0};
    Bath bath{Bath::w};
    double rate{0.0};
};

// Continuous-time Markov chain equivalent to the secular master equation of a
// model whose channels are single eigenstate dyads over a nondegenerate
// spectrum. State labels map ascending indices to conventional labels
// (0-based) when the model has them.
struct JumpProcess {
    ModelKind kind{ModelKind::FourLevel};
    RealVector energies;
    std::vector<std::vector<JumpChannel>> outgoing;  // per source state
    std::vector<double> exit_rate;
    std::vector<int> label;                          // ascending index -> conventional label
    RealVector stationary;                           // populations over the ascending basis
};

inline JumpProcess make_jump_process(const SystemModel& model, const BathSet& baths)
{
    const Liouvillian l = build_liouvillian(model, baths);
    const Eigen::Index d = l.dim;
    const RealVector& e = l.eigensystem.energies;
    const double span = e.maxCoeff() - e.minCoeff();
    for (Eigen::Index k = 0; k + 1 < d; ++k) {
        if (e(k + 1) - e(k) <= kFrequencyMergeTol * std::max(span, 1.0)) {
            throw std::invalid_argument("jump unravelling needs a nondegenerate spectrum; populations and "
                                        "coherences do not decouple for this model");
        }
    }
    JumpProcess jp;
    jp.kind = model.kind;
    jp.energies = e;
    jp.outgoing.assign(static_cast<std::size_t>(d), {});
    jp.exit_rate.assign(static_cast<std::size_t>(d), 0.0);
    for (Bath b : kAllBaths) {
        for (const auto& ch : l.channels[b]) {
            if (ch.transitions.size() != 1) {
                throw std::invalid_argument("jump unravelling needs single-transition channels; the " +
                                            std::string(long_name(b)) + " channel at omega = " +
                                            std::to_string(ch.omega) + " mixes " +
                                            std::to_string(ch.transitions.size()) + " transitions");
            }
            const auto& t = ch.transitions.front();
            const double w = std::norm(t.amplitude);
            if (ch.rate_down > 0.0) jp.outgoing[t.upper].push_back({t.upper, t.lower, b, w * ch.rate_down});
            if (ch.rate_up > 0.0) jp.outgoing[t.lower].push_back({t.lower, t.upper, b, w * ch.rate_up});
        }
    }
    for (std::size_t s = 0; s < jp.outgoing.size(); ++s) {
        for (const auto& c : jp.outgoing[s]) jp.exit_rate[s] += c.rate;
    }

    jp.label.resize(static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < d; ++k) jp.label[k] = static_cast<int>(k);
    if (auto lab = labeled_eigensystem(model)) {
        for (Eigen::Index k = 0; k < d; ++k) {
            Eigen::Index best = 0;
            (lab->energies.array() - e(k)).abs().minCoeff(&best);
            jp.label[k] = static_cast<int>(best);
        }
    }
    jp.stationary = populations(l.eigensystem, steady_state(l).rho);
    return jp;
}

// Keyed generator: (seed, trajectory index) fixes the stream.
class KeyedRng {
public:
    KeyedRng(std::uint64_t seed, std::uint64_t index)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double exponential() { return -std::log1p(-uniform()); }

private:
    std::mt19937_64 engine_;
};

namespace detail {

inline Eigen::Index draw_index(const RealVector& weights, double u)
{
    const double total = weights.sum();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
        acc += std::max(weights(k), 0.0);
        if (u * total < acc) return k;
    }
    return weights.size() - 1;
}

} // namespace detail

// Streams jumps of one trajectory to a callback f(const JumpEvent&). Returns
// the initial state.
template <class F>
Eigen::Index run_trajectory(const JumpProcess& jp, double duration, std::uint64_t seed, std::uint64_t index, F&& f)
{
    if (!(duration > 0.0)) throw std::invalid_argument("trajectory duration must be positive");
    KeyedRng rng(seed, index);
    const Eigen::Index s0 = detail::draw_index(jp.stationary, rng.uniform());
    Eigen::Index s = s0;
    double t = 0.0;
    while (true) {
        const double out = jp.exit_rate[s];
        if (!(out > 0.0)) break;
        t += rng.exponential() / out;
        if (t >= duration) break;
        const double pick = rng.uniform() * out;
        const auto& chans = jp.outgoing[s];
        std::size_t k = 0;
        double acc = chans[0].rate;
        while (pick >= acc && k + 1 < chans.size()) acc += chans[++k].rate;
        const JumpChannel& c = chans[k];
        f(JumpEvent{t, s, c.to, c.bath, jp.energies(c.to) - jp.energies(s)});
        s = c.to;
    }
    return s0;
}

inline std::vector<JumpEvent> sample_trajectory(const JumpProcess& jp, double duration, std::uint64_t seed,
                                                std::uint64_t index = 0)
{
    std::vector<JumpEvent> events;
    run_trajectory(jp, duration, seed, index, [&](const JumpEvent& e) { events.push_back(e); });
    return events;
}

inline std::vector<JumpEvent> sample_trajectory(const SystemModel& model, const BathSet& baths, double duration,
                                                std::uint64_t seed, std::uint64_t index = 0)
{
    return sample_trajectory(make_jump_process(model, baths), duration, seed, index);
}

// Primitive cycles of the four-level chiller as (bath, from, to) sequences
// over 0-based conventional labels.
struct CyclePattern {
    CycleTag tag;
    std::vector<std::tuple<Bath, int, int>> steps;
};

inline const std::vector<CyclePattern>& four_level_cycle_patterns()
{
    static const std::vector<CyclePattern> patterns{
        {CycleTag::C1, {{Bath::c, 0, 2}, {Bath::w, 2, 3}, {Bath::h, 3, 0}}},
        {CycleTag::C2, {{Bath::h, 0, 3}, {Bath::w, 3, 2}, {Bath::c, 2, 0}}},
        {CycleTag::C3, {{Bath::c, 0, 1}, {Bath::w, 1, 3}, {Bath::h, 3, 0}}},
        {CycleTag::C4, {{Bath::h, 0, 3}, {Bath::w, 3, 1}, {Bath::c, 1, 0}}},
        {CycleTag::C5, {{Bath::c, 0, 1}, {Bath::w, 1, 3}, {Bath::w, 3, 2}, {Bath::c, 2, 0}}},
        {CycleTag::C6, {{Bath::c, 0, 2}, {Bath::w, 2, 3}, {Bath::w, 3, 1}, {Bath::c, 1, 0}}},
    };
    return patterns;
}

// Loop-erasure classifier. Jumps are pushed on a path; when the path revisits
// a state the enclosed primitive loop is popped and matched (up to cyclic
// rotation) against the four-level cycles. Everything else, including
// immediate back-and-forth jumps, is tagged "other".
class CycleClassifier {
public:
    CycleClassifier(const JumpProcess& jp, Eigen::Index start) : jp_(&jp), four_level_(jp.kind == ModelKind::FourLevel)
    {
        states_.push_back(start);
    }

    void push(const JumpEvent& e)
    {
        const int from = jp_->label[e.from_state];
        const int to = jp_->label[e.to_state];
        steps_.emplace_back(e.bath, from, to);
        states_.push_back(e.to_state);
        for (std::size_t k = states_.size() - 1; k-- > 0;) {
            if (states_[k] == e.to_state) {
                std::vector<std::tuple<Bath, int, int>> loop(steps_.begin() + static_cast<std::ptrdiff_t>(k),
                                                             steps_.end());
                ++tally_[classify(loop)];
                steps_.resize(k);
                states_.resize(k + 1);
                break;
            }
        }
    }

    CycleTally& tally() { return tally_; }

    CycleTag classify(const std::vector<std::tuple<Bath, int, int>>& loop) const
    {
        if (!four_level_) return CycleTag::other;
        for (const auto& p : four_level_cycle_patterns()) {
            if (p.steps.size() != loop.size()) continue;
            for (std::size_t r = 0; r < loop.size(); ++r) {
                bool match = true;
                for (std::size_t i = 0; i < loop.size() && match; ++i) {
                    match = loop[(i + r) % loop.size()] == p.steps[i];
                }
                if (match) return p.tag;
            }
        }
        return CycleTag::other;
    }

private:
    const JumpProcess* jp_;
    bool four_level_;
    std::vector<Eigen::Index> states_;
    std::vector<std::tuple<Bath, int, int>> steps_;
    CycleTally tally_;
};

inline CycleTally classify_cycles(const JumpProcess& jp, Eigen::Index start, const std::vector<JumpEvent>& events,
                                  double total_time)
{
    CycleClassifier c(jp, start);
    for (const auto& e : events) c.push(e);
    c.tally().total_time = total_time;
    return c.tally();
}

struct MeanError {
    double mean{0.0};
    double error{0.0};
};

struct CurrentEstimate {
    PerBath<MeanError> currents;
    std::vector<MeanError> occupation;  // time fraction per ascending eigenstate
    MeanError i_plus;                   // (C1 - C2) / t
    MeanError i_minus;                  // (C3 - C4) / t
    MeanError i_leak;                   // 2 (C6 - C5) / t
    CycleTally tally;
    std::uint64_t n_trajectories{0};
    std::uint64_t seed{0};
    double duration{0.0};
    std::uint64_t jumps{0};
};

struct TrajectorySummary {
    PerBath<double> heat{};
    std::vector<double> dwell;
    CycleTally tally;
    std::uint64_t jumps{0};
};

inline TrajectorySummary summarize_trajectory(const JumpProcess& jp, double duration, std::uint64_t seed,
                                              std::uint64_t index)
{
    TrajectorySummary s;
    s.dwell.assign(jp.outgoing.size(), 0.0);
    double last = 0.0;
    Eigen::Index state = 0;
    std::optional<CycleClassifier> cls;
    bool first = true;
    auto on_jump = [&](const JumpEvent& e) {
        if (first) {
            cls.emplace(jp, e.from_state);
            first = false;
        }
        s.dwell[e.from_state] += e.time - last;
        last = e.time;
        state = e.to_state;
        s.heat[e.bath] += e.quantum;
        cls->push(e);
        ++s.jumps;
    };
    const Eigen::Index s0 = run_trajectory(jp, duration, seed, index, on_jump);
    if (first) state = s0;
    s.dwell[state] += duration - last;
    if (cls) s.tally = cls->tally();
    s.tally.total_time = duration;
    return s;
}

namespace detail {

inline MeanError mean_error(const std::vector<double>& x)
{
    const double n = static_cast<double>(x.size());
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

} // namespace detail

// Ensemble estimate of the steady-state heat currents. Each trajectory starts
// from the stationary populations; trajectories are independent and reduced
// in index order, so results do not depend on the thread count.
inline CurrentEstimate estimate_currents(const JumpProcess& jp, std::uint64_t n_trajectories, double duration,
                                         std::uint64_t seed)
{
    if (n_trajectories < 2) throw std::invalid_argument("estimate_currents needs at least two trajectories");
    if (!(duration > 0.0)) throw std::invalid_argument("trajectory duration must be positive");
    std::vector<TrajectorySummary> runs(n_trajectories);
    parallel_for(n_trajectories, [&](std::size_t k) { runs[k] = summarize_trajectory(jp, duration, seed, k); });

    CurrentEstimate est;
    est.n_trajectories = n_trajectories;
    est.seed = seed;
    est.duration = duration;
    std::vector<double> buf(n_trajectories);
    for (Bath b : kAllBaths) {
        for (std::size_t k = 0; k < runs.size(); ++k) buf[k] = runs[k].heat[b] / duration;
        est.currents[b] = detail::mean_error(buf);
    }
    const std::size_t d = jp.outgoing.size();
    for (std::size_t s = 0; s < d; ++s) {
        for (std::size_t k = 0; k < runs.size(); ++k) buf[k] = runs[k].dwell[s] / duration;
        est.occupation.push_back(detail::mean_error(buf));
    }
    auto flux = [&](CycleTag fwd, CycleTag bwd, double factor) {
        for (std::size_t k = 0; k < runs.size(); ++k) {
            const auto& t = runs[k].tally;
            buf[k] = factor * (static_cast<double>(t[fwd]) - static_cast<double>(t[bwd])) / duration;
        }
        return detail::mean_error(buf);
    };
    est.i_plus = flux(CycleTag::C1, CycleTag::C2, 1.0);
    est.i_minus = flux(CycleTag::C3, CycleTag::C4, 1.0);
    est.i_leak = flux(CycleTag::C6, CycleTag::C5, 2.0);
    for (const auto& r : runs) {
        est.tally += r.tally;
        est.jumps += r.jumps;
    }
    return est;
}

inline CurrentEstimate estimate_currents(const SystemModel& model, const BathSet& baths, std::uint64_t n_trajectories,
                                         double duration, std::uint64_t seed)
{
    return estimate_currents(make_jump_process(model, baths), n_trajectories, duration, seed);
}

} // namespace qchill
