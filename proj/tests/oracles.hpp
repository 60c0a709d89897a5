// oracles.hpp - independent reference computations for the tests
//
// Nothing here calls into the library's solvers: rates are written out from
// the Bose-Einstein law, classical steady states come from the Markov chain
// tree theorem (principal minors), Gibbs states from the matrix exponential.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

inline double bose(double w, double t) { return 1.0 / std::expm1(w / t); }

// Flat ohmic bath: emission gamma w^3 (1 + n), absorption gamma w^3 n.
inline double emission(double gamma, double w, double t) { return gamma * w * w * w * (1.0 + bose(w, t)); }
inline double absorption(double gamma, double w, double t) { return gamma * w * w * w * bose(w, t); }

struct Edge {
    int a;  // lower-energy state
    int b;  // higher-energy state
    int bath;  // 0 = w, 1 = h, 2 = c
    double down;  // b -> a
    double up;    // a -> b
};

struct RateGraph {
    std::vector<double> energy;
    std::vector<Edge> edges;

    Eigen::MatrixXd generator() const
    {
        const auto n = static_cast<Eigen::Index>(energy.size());
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
        for (const auto& e : edges) {
            w(e.a, e.b) += e.down;
            w(e.b, e.b) -= e.down;
            w(e.b, e.a) += e.up;
            w(e.a, e.a) -= e.up;
        }
        return w;
    }

    // Markov chain tree theorem: p_i proportional to the i-th principal minor of -W.
    Eigen::VectorXd stationary() const
    {
        const Eigen::MatrixXd l = -generator();
        const auto n = l.rows();
        Eigen::VectorXd p(n);
        for (Eigen::Index i = 0; i < n; ++i) p(i) = minor(l, i);
        return p / p.sum();
    }

    // Sum of all rooted spanning-tree weights.
    double tree_normalization() const
    {
        const Eigen::MatrixXd l = -generator();
        double s = 0.0;
        for (Eigen::Index i = 0; i < l.rows(); ++i) s += minor(l, i);
        return s;
    }

    std::array<double, 3> currents(const Eigen::VectorXd& p) const
    {
        std::array<double, 3> q{};
        for (const auto& e : edges) {
            const double de = energy[e.b] - energy[e.a];
            q[e.bath] += (p(e.a) * e.up - p(e.b) * e.down) * de;
        }
        return q;
    }

    static double minor(const Eigen::MatrixXd& l, Eigen::Index k)
    {
        const auto n = l.rows();
        Eigen::MatrixXd m(n - 1, n - 1);
        for (Eigen::Index i = 0, r = 0; i < n; ++i) {
            if (i == k) continue;
            for (Eigen::Index j = 0, c = 0; j < n; ++j) {
                if (j == k) continue;
                m(r, c++) = l(i, j);
            }
            ++r;
        }
        return m.determinant();
    }
};

struct Temps {
    double w{9.0};
    double h{8.0};
    double c{7.0};
};

inline double temp_of(const Temps& t, int bath) { return bath == 0 ? t.w : bath == 1 ? t.h : t.c; }

inline Edge edge(int a, int b, int bath, double w, double weight, double gamma, const Temps& t)
{
    const double tt = temp_of(t, bath);
    return {a, b, bath, weight * emission(gamma, w, tt), weight * absorption(gamma, w, tt)};
}

// Four-level chiller in its labelled eigenbasis (energies 0, wc-g, wc+g, wh).
// Cold and work couplings have matrix elements 1/sqrt2 (weight 1/2).
inline RateGraph four_level(double wc, double wh, double g, const Temps& t, double gamma = 1e-3)
{
    RateGraph r;
    r.energy = {0.0, wc - g, wc + g, wh};
    r.edges.push_back(edge(0, 3, 1, wh, 1.0, gamma, t));
    r.edges.push_back(edge(0, 1, 2, wc - g, 0.5, gamma, t));
    r.edges.push_back(edge(0, 2, 2, wc + g, 0.5, gamma, t));
    r.edges.push_back(edge(1, 3, 0, wh - wc + g, 0.5, gamma, t));
    r.edges.push_back(edge(2, 3, 0, wh - wc - g, 0.5, gamma, t));
    return r;
}

inline RateGraph three_level(double wc, double wh, const Temps& t, double gamma = 1e-3)
{
    RateGraph r;
    r.energy = {0.0, wc, wh};
    r.edges.push_back(edge(0, 1, 2, wc, 1.0, gamma, t));
    r.edges.push_back(edge(0, 2, 1, wh, 1.0, gamma, t));
    r.edges.push_back(edge(1, 2, 0, wh - wc, 1.0, gamma, t));
    return r;
}

// omega_c at which the three-level chiller is reversible:
// w_h / T_h = w_c / T_c + (w_h - w_c) / T_w.
inline double reversible_omega_c(const Temps& t, double wh)
{
    return wh * (1.0 / t.h - 1.0 / t.w) / (1.0 / t.c - 1.0 / t.w);
}

inline double carnot(const Temps& t) { return (1.0 - t.h / t.w) / (t.h / t.c - 1.0); }

// Three-qubit spectrum: product energies with the resonant pair split by +-g.
inline std::vector<double> three_qubit_energies(double wc, double wh, double g)
{
    const double ww = wh - wc;
    std::vector<double> e{0.0, wc, ww, wh - g, wh + g, wh + wc, ww + wh, ww + wh + wc};
    std::sort(e.begin(), e.end());
    return e;
}

inline Eigen::MatrixXcd gibbs(const Eigen::MatrixXcd& h, double t)
{
    const Eigen::MatrixXcd x = (-h / t).exp();
    return x / x.trace();
}

// Golden-section-free reference maximum on a dense grid.
template <class F>
std::pair<double, double> grid_max(F&& f, double lo, double hi, int n)
{
    double bx = lo, bv = f(lo);
    for (int k = 1; k <= n; ++k) {
        const double x = lo + (hi - lo) * k / n;
        const double v = f(x);
        if (v > bv) {
            bv = v;
            bx = x;
        }
    }
    return {bx, bv};
}

// 64-bit FNV-1a of a byte string.
inline std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace oracle
