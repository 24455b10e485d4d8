#include <catch2/catch_amalgamated.hpp>

#include "igp/measures.hpp"
#include "igp/sampling.hpp"
#include "testutil.hpp"

using namespace igp;

namespace {

DensityMatrix plus_i_state() {
    CMatrix m(2, 2);
    m << 0.5, Complex(0, -0.5), Complex(0, 0.5), 0.5;
    return validate_density(m);
}

} // namespace

TEST_CASE("imaginarity on known states") {
    RngStream rng(71, 0);
    // Real-entried states carry exactly zero imaginarity.
    for (int rep = 0; rep < 20; ++rep) {
        const DensityMatrix rho = real_state_at_purity(3, 0.6, rng, SpectrumMode::two_level);
        CHECK(imaginarity(rho) == 0.0);
    }
    CHECK(imaginarity(plus_i_state()) == Catch::Approx(0.5).margin(1e-12));
    CHECK(imaginarity(validate_density(CMatrix::Identity(5, 5) / 5.0)) == 0.0);
}

TEST_CASE("imaginarity_in_basis") {
    RngStream rng(72, 0);
    const DensityMatrix rho = random_density_hs(3, rng);
    const BasisChange ident{UnitaryMatrix(CMatrix::Identity(3, 3))};
    CHECK(imaginarity_in_basis(rho, ident) == Catch::Approx(imaginarity(rho)).margin(1e-14));

    // A basis diagonalizing rho renders it real.
    const DensityMatrix plus_i = plus_i_state();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(plus_i.mat());
    const BasisChange diag_basis{UnitaryMatrix(es.eigenvectors())};
    CHECK(imaginarity_in_basis(plus_i, diag_basis) <= 1e-12);

    // Definitional identity against the direct construction.
    const UnitaryMatrix v = haar_unitary(3, rng);
    const BasisChange b{v};
    const CMatrix rotated = v.mat().adjoint() * rho.mat() * v.mat();
    CHECK(imaginarity_in_basis(rho, b) ==
          Catch::Approx(imaginarity(validate_density(rotated))).margin(1e-14));

    CHECK_THROWS_AS(imaginarity_in_basis(rho, BasisChange{UnitaryMatrix(CMatrix::Identity(2, 2))}),
                    DimensionMismatch);
}

TEST_CASE("apply_channel basics") {
    RngStream rng(73, 0);
    const DensityMatrix rho = random_density_hs(3, rng);

    const RealUnitalChannel ident(
        {{1.0, OrthogonalMatrix(RMatrix::Identity(3, 3))}});
    CHECK((apply_channel(ident, rho).mat() - rho.mat()).cwiseAbs().maxCoeff() <= 1e-14);

    const RealUnitalChannel ch = random_real_unital_channel(3, 3, rng);
    const DensityMatrix mixed = validate_density(CMatrix::Identity(3, 3) / 3.0);
    CHECK((apply_channel(ch, mixed).mat() - mixed.mat()).cwiseAbs().maxCoeff() <= 1e-12);

    const DensityMatrix real_rho = real_state_at_purity(3, 0.7, rng, SpectrumMode::two_level);
    CHECK(imaginarity(apply_channel(ch, real_rho)) <= 1e-14);

    CHECK_THROWS_AS(apply_channel(ch, random_density_hs(2, rng)), DimensionMismatch);
}

TEST_CASE("channel construction validates weights") {
    RngStream rng(74, 0);
    const OrthogonalMatrix o = haar_orthogonal(2, rng);
    CHECK_THROWS_AS(RealUnitalChannel({{0.4, o}, {0.4, o}}), Error);
    CHECK_THROWS_AS(RealUnitalChannel({{-0.5, o}, {1.5, o}}), Error);
}

TEST_CASE("faithfulness over random real and complex states") {
    RngStream rng(75, 0);
    for (int rep = 0; rep < 1000; ++rep) {
        const int d = 2 + rep % 3;
        if (rep % 2 == 0) {
            const DensityMatrix rho =
                real_state_at_purity(d, 1.0 / d + (1.0 - 1.0 / d) * rng.uniform(), rng,
                                     SpectrumMode::random_simplex);
            CHECK(imaginarity(rho) == 0.0);
        } else {
            const DensityMatrix rho = random_density_hs(d, rng);
            double max_im = 0.0;
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    max_im = std::max(max_im, std::abs(rho.mat()(i, j).imag()));
                }
            }
            if (max_im > 1e-10) {
                CHECK(imaginarity(rho) > 0.0);
            } else {
                CHECK(imaginarity(rho) <= 1e-10);
            }
        }
    }
}

TEST_CASE("monotonicity under random real unital channels") {
    RngStream rng(76, 0);
    for (int rep = 0; rep < 1000; ++rep) {
        const int d = 2 + rep % 3;
        const int k = 1 + static_cast<int>(rng.next_u64() % 4);
        const DensityMatrix rho = random_density_hs(d, rng);
        const RealUnitalChannel ch = random_real_unital_channel(d, k, rng);
        CHECK(imaginarity(apply_channel(ch, rho)) <= imaginarity(rho) + 1e-10);
    }
}

TEST_CASE("orthogonal invariance of imaginarity") {
    RngStream rng(77, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const int d = 2 + rep % 4;
        const DensityMatrix rho = random_density_hs(d, rng);
        const CMatrix o = haar_orthogonal(d, rng).complex_mat();
        const DensityMatrix rotated = validate_density(o * rho.mat() * o.transpose());
        CHECK(std::abs(imaginarity(rotated) - imaginarity(rho)) <= 1e-10);
    }
}

TEST_CASE("convexity of imaginarity") {
    RngStream rng(78, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const int d = 2 + rep % 3;
        const DensityMatrix a = random_density_hs(d, rng);
        const DensityMatrix b = random_density_hs(d, rng);
        for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const DensityMatrix mix =
                validate_density(lam * a.mat() + (1.0 - lam) * b.mat());
            CHECK(imaginarity(mix) <=
                  lam * imaginarity(a) + (1.0 - lam) * imaginarity(b) + 1e-10);
        }
    }
}

TEST_CASE("orthogonal-mixture channels commute with transposition") {
    RngStream rng(80, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const int d = 2 + rep % 3;
        const DensityMatrix rho = random_density_hs(d, rng);
        const RealUnitalChannel ch =
            random_real_unital_channel(d, 1 + static_cast<int>(rng.next_u64() % 3), rng);
        const CMatrix lhs = apply_channel(ch, rho).mat().transpose();
        const CMatrix rhs =
            apply_channel(ch, validate_density(rho.mat().transpose())).mat();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("imaginarity range bound") {
    RngStream rng(79, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const DensityMatrix rho = random_density_hs(2 + rep % 4, rng);
        const double v = imaginarity(rho);
        CHECK(v >= 0.0);
        CHECK(v <= 0.5 * purity(rho) + 1e-12);
    }
}
