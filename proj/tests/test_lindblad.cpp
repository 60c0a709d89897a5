#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qchill/lindblad.hpp"
#include "qchill/thermo.hpp"

using namespace qchill;

namespace {

const std::vector<ModelKind> kKinds{ModelKind::ThreeLevel, ModelKind::ThreeLevelShorted, ModelKind::FourLevel,
                                    ModelKind::FourLevelPrime, ModelKind::FourLevelDoublePrime,
                                    ModelKind::ThreeQubit};

Matrix random_state(Eigen::Index d, unsigned seed)
{
    std::srand(seed);
    const Matrix a = Matrix::Random(d, d);
    Matrix rho = a * a.adjoint();
    return rho / rho.trace();
}

std::size_t transition_count(const Liouvillian& l)
{
    std::size_t n = 0;
    for (Bath b : kAllBaths) {
        for (const auto& ch : l.channels[b]) n += ch.transitions.size();
    }
    return n;
}

} // namespace

TEST(Rates, MatchBoseEinsteinOracle)
{
    const BathSpec b{Bath::h, 8.0, 1e-3, FlatFilter{}};
    for (double w : {0.01, 0.5, 2.0, 6.0, 40.0}) {
        const RatePair r = rate(b, w);
        EXPECT_NEAR(r.down, oracle::emission(1e-3, w, 8.0), 1e-14 * r.down);
        EXPECT_NEAR(r.up, oracle::absorption(1e-3, w, 8.0), 1e-14 * r.down);
    }
}

TEST(Rates, DetailedBalance)
{
    const BathSpec b{Bath::c, 7.0, 2e-3, FlatFilter{}};
    for (double w : {0.1, 1.0, 3.0, 9.0}) {
        const RatePair r = rate(b, w);
        EXPECT_NEAR(r.up / r.down, std::exp(-w / 7.0), 1e-14);
    }
}

TEST(Rates, SignedConvention)
{
    const BathSpec b{Bath::w, 9.0, 1e-3, FlatFilter{}};
    EXPECT_DOUBLE_EQ(signed_rate(b, 2.0), rate(b, 2.0).down);
    EXPECT_DOUBLE_EQ(signed_rate(b, -2.0), rate(b, 2.0).up);
    EXPECT_EQ(signed_rate(b, 0.0), 0.0);
    EXPECT_THROW(rate(b, 0.0), std::invalid_argument);
    EXPECT_THROW(rate(b, -1.0), std::invalid_argument);
}

TEST(Rates, FilterScalesBothDirections)
{
    const BathSpec b{Bath::w, 9.0, 1e-3, Lorentzian{4.0, 1.0}};
    const BathSpec flat{Bath::w, 9.0, 1e-3, FlatFilter{}};
    const RatePair r = rate(b, 5.0);
    const RatePair f = rate(flat, 5.0);
    EXPECT_NEAR(r.down, 0.5 * f.down, 1e-15);
    EXPECT_NEAR(r.up, 0.5 * f.up, 1e-15);
    const BathSpec cut{Bath::w, 9.0, 1e-3, HighCutoff{4.0}};
    EXPECT_EQ(rate(cut, 5.0).down, 0.0);
    EXPECT_EQ(rate(cut, 5.0).up, 0.0);
}

TEST(Rates, TrackingCutoffResolvesToWorkFrequency)
{
    const BathSpec b{Bath::w, 9.0, 1e-3, TrackingCutoff{0.05}};
    const BathSpec r = resolve(b, ModelParams{2.0, 6.0, 0.1, 0.0});
    ASSERT_TRUE(std::holds_alternative<HighCutoff>(r.filter));
    EXPECT_DOUBLE_EQ(std::get<HighCutoff>(r.filter).omega_max, 4.05);
}

TEST(Channels, CountsPerModel)
{
    const BathSet baths = make_baths(9, 8, 7);
    struct Expect {
        ModelKind kind;
        std::size_t channels;
        std::size_t transitions;
    };
    for (const Expect& e : {Expect{ModelKind::ThreeLevel, 3, 3}, Expect{ModelKind::FourLevel, 5, 5},
                            Expect{ModelKind::FourLevelPrime, 5, 5}, Expect{ModelKind::FourLevelDoublePrime, 5, 5},
                            Expect{ModelKind::ThreeQubit, 9, 18}}) {
        const Liouvillian l = build_liouvillian(build_model(e.kind, {2.0, 6.0, 0.1, 0.0}), baths);
        std::size_t n = 0;
        for (Bath b : kAllBaths) n += l.channels[b].size();
        EXPECT_EQ(n, e.channels) << to_string(e.kind);
        EXPECT_EQ(transition_count(l), e.transitions) << to_string(e.kind);
    }
}

TEST(Channels, DegenerateGapsMergeAtZeroCoupling)
{
    const Liouvillian l = build_liouvillian(build_four_level(2.0, 6.0, 0.0), make_baths(9, 8, 7));
    EXPECT_EQ(l.channels[Bath::c].size(), 1u);
    EXPECT_EQ(l.channels[Bath::w].size(), 1u);
    EXPECT_EQ(l.channels[Bath::h].size(), 1u);
}

TEST(Channels, LoweringOperatorsLowerEnergyByOmega)
{
    const SystemModel m = build_three_qubit(2.0, 6.0, 0.1);
    const Liouvillian l = build_liouvillian(m, make_baths(9, 8, 7));
    for (Bath b : kAllBaths) {
        for (const auto& ch : l.channels[b]) {
            // [H, A] = -omega A
            const Matrix c = m.hamiltonian * ch.lowering - ch.lowering * m.hamiltonian + ch.omega * ch.lowering;
            EXPECT_LT(c.cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Superoperator, VecMatchesMatrixAction)
{
    const Eigen::Index d = 3;
    const Matrix a = Matrix::Random(d, d);
    const Matrix b = Matrix::Random(d, d);
    const Matrix x = Matrix::Random(d, d);
    // vec(A X B) = (B^T kron A) vec(X)
    const Vector lhs = superop::vec(a * x * b);
    const Vector rhs = superop::kron(b.transpose(), a) * superop::vec(x);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_EQ((superop::unvec(superop::vec(x), d) - x).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Liouvillian, TracePreservingAndHermiticityPreserving)
{
    const BathSet baths = make_baths(9, 8, 7);
    for (auto k : kKinds) {
        const SystemModel m = build_model(k, {2.0, 6.0, 0.1, 0.3});
        const Liouvillian l = build_liouvillian(m, baths);
        const Matrix rho = random_state(m.dimension, 7);
        const Matrix out = apply_total(l, rho);
        EXPECT_LT(std::abs(out.trace()), 1e-13) << to_string(k);
        EXPECT_LT((out - out.adjoint()).cwiseAbs().maxCoeff(), 1e-13) << to_string(k);
        for (Bath b : kAllBaths) {
            EXPECT_LT(std::abs(apply_dissipator(l, b, rho).trace()), 1e-13) << to_string(k);
        }
    }
}

TEST(Liouvillian, ApplyByLabel)
{
    const Liouvillian l = build_liouvillian(build_four_level(2.0, 6.0, 0.1), make_baths(9, 8, 7));
    const Matrix rho = random_state(4, 3);
    EXPECT_EQ((apply_dissipator(l, "c", rho) - apply_dissipator(l, Bath::c, rho)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(apply_dissipator(l, "x", rho), std::invalid_argument);
}

TEST(Liouvillian, GibbsStateIsStationaryPerBath)
{
    // Each dissipator alone fixes the Gibbs state at its own temperature.
    for (auto k : kKinds) {
        const SystemModel m = build_model(k, {2.0, 6.0, 0.1, 0.3});
        const BathSet baths = make_baths(8, 8, 8);
        const Liouvillian l = build_liouvillian(m, baths);
        const Matrix g = oracle::gibbs(m.hamiltonian, 8.0);
        for (Bath b : kAllBaths) {
            EXPECT_LT(apply_dissipator(l, b, g).cwiseAbs().maxCoeff(), 1e-12) << to_string(k);
        }
        EXPECT_LT(apply_total(l, g).cwiseAbs().maxCoeff(), 1e-12) << to_string(k);
    }
}
