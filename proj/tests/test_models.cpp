#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qchill/models.hpp"

using namespace qchill;

namespace {

constexpr double kWc = 2.0;
constexpr double kWh = 6.0;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST(Filters, Transmission)
{
    EXPECT_EQ(transmission(FlatFilter{}, 3.0), 1.0);
    EXPECT_EQ(transmission(HighCutoff{4.0}, 4.0), 1.0);
    EXPECT_EQ(transmission(HighCutoff{4.0}, -3.9), 1.0);
    EXPECT_EQ(transmission(HighCutoff{4.0}, 4.0000001), 0.0);
    EXPECT_DOUBLE_EQ(transmission(Lorentzian{2.0, 0.5}, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(transmission(Lorentzian{2.0, 0.5}, 2.5), 0.5);
    EXPECT_THROW(transmission(TrackingCutoff{0.0}, 1.0), std::logic_error);
}

TEST(Filters, ValidationRejectsBadParameters)
{
    EXPECT_THROW(validate(SpectralFilter{HighCutoff{0.0}}), std::invalid_argument);
    EXPECT_THROW(validate(SpectralFilter{Lorentzian{1.0, 0.0}}), std::invalid_argument);
    EXPECT_NO_THROW(validate(SpectralFilter{FlatFilter{}}));
}

TEST(Baths, RejectsNonPositiveTemperatureOrCoupling)
{
    BathSet b = make_baths(9, 8, 7);
    EXPECT_NO_THROW(validate(b));
    b[Bath::c].temperature = 0.0;
    EXPECT_THROW(validate(b), std::invalid_argument);
    b = make_baths(9, 8, 7);
    b[Bath::h].gamma = -1.0;
    EXPECT_THROW(validate(b), std::invalid_argument);
}

TEST(Models, KindNamesRoundTrip)
{
    for (auto k : {ModelKind::ThreeLevel, ModelKind::ThreeLevelShorted, ModelKind::FourLevel,
                   ModelKind::FourLevelPrime, ModelKind::FourLevelDoublePrime, ModelKind::ThreeQubit}) {
        EXPECT_EQ(model_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(model_kind_from_string("five_level"), std::invalid_argument);
}

TEST(Models, RejectBadFrequencies)
{
    EXPECT_THROW(build_three_level(0.0, kWh), std::invalid_argument);
    EXPECT_THROW(build_three_level(kWh, kWh), std::invalid_argument);
    EXPECT_THROW(build_four_level(kWc, kWh, -0.1), std::invalid_argument);
    EXPECT_THROW(build_three_level_shorted(kWc, kWh, 1.5), std::invalid_argument);
}

TEST(Models, HamiltoniansAreHermitianAndContactsSymmetric)
{
    for (auto k : {ModelKind::ThreeLevel, ModelKind::ThreeLevelShorted, ModelKind::FourLevel,
                   ModelKind::FourLevelPrime, ModelKind::FourLevelDoublePrime, ModelKind::ThreeQubit}) {
        const SystemModel m = build_model(k, {kWc, kWh, 0.1, 0.3});
        EXPECT_LT(max_abs(m.hamiltonian - m.hamiltonian.adjoint()), 1e-15) << to_string(k);
        for (Bath b : kAllBaths) {
            EXPECT_LT(max_abs(m.contacts[b] - m.contacts[b].adjoint()), 1e-15) << to_string(k);
            EXPECT_GT(max_abs(m.contacts[b]), 0.0) << to_string(k);
        }
        EXPECT_EQ(m.hamiltonian.rows(), m.dimension);
    }
}

TEST(Models, FourLevelEigensystemMatchesClosedForm)
{
    for (double g : {0.0, 0.1, 0.5}) {
        const SystemModel m = build_four_level(kWc, kWh, g);
        const Eigensystem es = eigendecompose(m);
        const auto lab = labeled_eigensystem(m);
        ASSERT_TRUE(lab);
        std::vector<double> expect{0.0, kWc - g, kWc + g, kWh};
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(es.energies(k), expect[k], 1e-14);
        // Labelled eigenvectors diagonalize H exactly.
        const Matrix d = lab->basis.adjoint() * m.hamiltonian * lab->basis;
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(d(k, k).real(), expect[k], 1e-14);
        EXPECT_LT(max_abs(d - Matrix(d.diagonal().asDiagonal())), 1e-14);
        EXPECT_LT(max_abs(lab->basis.adjoint() * lab->basis - Matrix::Identity(4, 4)), 1e-14);
    }
}

TEST(Models, VariantEigensystemsMatchClosedForm)
{
    const double g = 0.2;
    for (auto k : {ModelKind::FourLevelPrime, ModelKind::FourLevelDoublePrime}) {
        const SystemModel m = build_model(k, {kWc, kWh, g, 0.0});
        const auto lab = labeled_eigensystem(m);
        ASSERT_TRUE(lab);
        const Matrix d = lab->basis.adjoint() * m.hamiltonian * lab->basis;
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(d(i, i).real(), lab->energies(i), 1e-14);
        EXPECT_LT(max_abs(d - Matrix(d.diagonal().asDiagonal())), 1e-14);
    }
}

TEST(Models, ThreeQubitSpectrumMatchesProductEnergies)
{
    for (double g : {0.0, 0.1, 0.5}) {
        const Eigensystem es = eigendecompose(build_three_qubit(kWc, kWh, g));
        const auto expect = oracle::three_qubit_energies(kWc, kWh, g);
        for (int k = 0; k < 8; ++k) EXPECT_NEAR(es.energies(k), expect[k], 1e-13) << "g=" << g;
        EXPECT_LT(max_abs(es.basis.adjoint() * es.basis - Matrix::Identity(8, 8)), 1e-13);
    }
    EXPECT_FALSE(labeled_eigensystem(build_three_qubit(kWc, kWh, 0.1)));
}

TEST(Models, LargeCouplingWarnsButBuilds)
{
    EXPECT_TRUE(build_four_level(kWc, kWh, 0.1).warnings.empty());
    EXPECT_FALSE(build_four_level(kWc, kWh, 0.7).warnings.empty());
    const SystemModel m = build_four_level(1.0, kWh, 1.5);
    EXPECT_EQ(m.warnings.size(), 2u);
}

TEST(Models, PopulationsOfDiagonalStateSumToOne)
{
    const SystemModel m = build_three_qubit(kWc, kWh, 0.1);
    const Eigensystem es = eigendecompose(m);
    const Matrix rho = Matrix::Identity(8, 8) / 8.0;
    const RealVector p = populations(es, rho);
    EXPECT_NEAR(p.sum(), 1.0, 1e-14);
    for (int k = 0; k < 8; ++k) EXPECT_NEAR(p(k), 0.125, 1e-14);
}
