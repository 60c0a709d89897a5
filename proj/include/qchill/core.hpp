// core.hpp - shared types for the qchill toolkit

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qchill {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Reservoir labels. Order is fixed: work, hot, cold.
enum class Bath : int { w = 0, h = 1, c = 2 };

inline constexpr std::array<Bath, 3> kAllBaths{Bath::w, Bath::h, Bath::c};

inline constexpr std::size_t index(Bath b) { return static_cast<std::size_t>(b); }

inline std::string_view to_string(Bath b)
{
    switch (b) {
    case Bath::w: return "w";
    case Bath::h: return "h";
    case Bath::c: return "c";
    }
    return "?";
}

inline std::string_view long_name(Bath b)
{
    switch (b) {
    case Bath::w: return "work";
    case Bath::h: return "hot";
    case Bath::c: return "cold";
    }
    return "?";
}

inline Bath bath_from_string(std::string_view s)
{
    if (s == "w" || s == "work") return Bath::w;
    if (s == "h" || s == "hot") return Bath::h;
    if (s == "c" || s == "cold") return Bath::c;
    throw std::invalid_argument("unknown bath label '" + std::string(s) + "'");
}

// Per-bath value triple indexed by Bath.
template <class T>
struct PerBath {
    std::array<T, 3> v{};

    T& operator[](Bath b) { return v[index(b)]; }
    const T& operator[](Bath b) const { return v[index(b)]; }
};

// Raised when a steady state cannot be produced (solver failure or
// non-unique fixed point). Maps to CLI exit code 2.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a computed quantity violates a physical invariant the toolkit
// promises (conservation, second law, breakdown identity). Exit code 3.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Matrix dyad(Eigen::Index dim, Eigen::Index row, Eigen::Index col)
{
    Matrix m = Matrix::Zero(dim, dim);
    m(row, col) = 1.0;
    return m;
}

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

} // namespace qchill
