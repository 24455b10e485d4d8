#include <catch2/catch_amalgamated.hpp>

#include "igp/core.hpp"
#include "igp/rng.hpp"
#include "igp/sampling.hpp"
#include "testutil.hpp"

using namespace igp;

namespace {

CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

} // namespace

TEST_CASE("validate_density accepts proper states") {
    CHECK(validate_density(0.5 * CMatrix::Identity(2, 2)).dim() == 2);

    // Pure projector: rank-1, near-singular, must still pass the PSD check.
    const DensityMatrix proj = validate_density(mat2(1.0, 0.0, 0.0, 0.0));
    CHECK(purity(proj) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("validate_density rejects bad inputs with named bounds") {
    const CMatrix bad = mat2(1.0, 1.0, 1.0, -0.5);
    CHECK_THROWS_AS(validate_density(bad), TraceNotOne);
    // Rescaled to unit trace it is still indefinite.
    CHECK_THROWS_AS(validate_density(bad / 0.5), NotPositive);

    CMatrix nh = mat2(0.5, Complex(0.1, 0.2), Complex(0.3, 0.1), 0.5);
    CHECK_THROWS_AS(validate_density(nh), NotHermitian);

    CMatrix rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(validate_density(rect), DimensionMismatch);
}

TEST_CASE("purity on known states") {
    CHECK(purity(validate_density(CMatrix::Identity(4, 4) / 4.0)) ==
          Catch::Approx(0.25).margin(1e-12));
    CHECK(purity(validate_density(mat2(0.7, 0.0, 0.0, 0.3))) ==
          Catch::Approx(0.58).margin(1e-12));
    RngStream rng(11, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const DensityMatrix rho = random_density_hs(4, rng);
        const double p = purity(rho);
        CHECK(p >= 0.25 - 1e-9);
        CHECK(p <= 1.0 + 1e-9);
    }
}

TEST_CASE("hs_norm_sq") {
    CHECK(hs_norm_sq(CMatrix::Zero(3, 3)) == 0.0);
    CHECK(hs_norm_sq(CMatrix::Identity(3, 3)) == Catch::Approx(3.0).margin(1e-14));
    CHECK(hs_norm_sq(mat2(0.0, Complex(0, -1), Complex(0, 1), 0.0)) ==
          Catch::Approx(2.0).margin(1e-14));

    // Entrywise sum and trace form agree to 1e-12 relative.
    RngStream rng(21, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const CMatrix a = test::random_matrix(5, rng);
        const double by_trace = (a.adjoint() * a).trace().real();
        const double by_entries = hs_norm_sq(a);
        CHECK(std::abs(by_trace - by_entries) <= 1e-12 * std::max(1.0, by_entries));
    }
}

TEST_CASE("tensor product block layout") {
    CHECK(tensor(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2))
              .isApprox(CMatrix::Identity(4, 4), 1e-15));

    const CMatrix d1i = mat2(1.0, 0.0, 0.0, Complex(0, 1));
    const CMatrix got = tensor(d1i, CMatrix::Identity(2, 2));
    CMatrix want = CMatrix::Zero(4, 4);
    want(0, 0) = 1.0;
    want(1, 1) = 1.0;
    want(2, 2) = Complex(0, 1);
    want(3, 3) = Complex(0, 1);
    CHECK(got.isApprox(want, 1e-15));

    // X (x) X flips |00> to |11>.
    const CMatrix x = mat2(0.0, 1.0, 1.0, 0.0);
    CVector e0 = CVector::Zero(4);
    e0(0) = 1.0;
    const CVector flipped = tensor(x, x) * e0;
    CHECK(std::abs(flipped(3) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(flipped.head(3).norm() < 1e-15);
}

TEST_CASE("tensor associativity on random matrices") {
    RngStream rng(31, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const CMatrix a = test::random_matrix(2, rng);
        const CMatrix b = test::random_matrix(3, rng);
        const CMatrix c = test::random_matrix(2, rng);
        const CMatrix lhs = tensor(tensor(a, b), c);
        const CMatrix rhs = tensor(a, tensor(b, c));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("max_entangled_state") {
    const PureStateVector phi2 = max_entangled_state(2);
    const double amp = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(phi2.amplitudes()(0) - Complex(amp, 0)) < 1e-15);
    CHECK(std::abs(phi2.amplitudes()(3) - Complex(amp, 0)) < 1e-15);
    CHECK(std::abs(phi2.amplitudes()(1)) == 0.0);
    CHECK(std::abs(phi2.amplitudes()(2)) == 0.0);

    const PureStateVector phi3 = max_entangled_state(3);
    CHECK(phi3.dim() == 9);
    CHECK(std::abs(phi3.amplitudes().norm() - 1.0) < 1e-12);

    CHECK_THROWS_AS(max_entangled_state(1), DimensionTooSmall);
}

TEST_CASE("fidelity_pure") {
    RngStream rng(41, 0);
    const PureStateVector psi = real_pure_state(4, rng);
    const CMatrix proj = psi.amplitudes() * psi.amplitudes().adjoint();
    CHECK(fidelity_pure(psi, validate_density(proj)) == Catch::Approx(1.0).margin(1e-12));

    CVector e0 = CVector::Zero(2);
    e0(0) = 1.0;
    CHECK(fidelity_pure(PureStateVector(e0), validate_density(mat2(0, 0, 0, 1))) ==
          Catch::Approx(0.0).margin(1e-15));

    CHECK(fidelity_pure(max_entangled_state(2), validate_density(CMatrix::Identity(4, 4) / 4.0)) ==
          Catch::Approx(0.25).margin(1e-12));

    CHECK_THROWS_AS(fidelity_pure(psi, validate_density(CMatrix::Identity(2, 2) / 2.0)),
                    DimensionMismatch);
}

TEST_CASE("fidelity_pure is global-phase invariant") {
    RngStream rng(51, 0);
    const DensityMatrix rho = random_density_hs(3, rng);
    CVector v(3);
    for (int i = 0; i < 3; ++i) {
        v(i) = Complex(rng.normal(), rng.normal());
    }
    v /= v.norm();
    const double f0 = fidelity_pure(PureStateVector(v), rho);
    const Complex phase(std::cos(1.234), std::sin(1.234));
    const double f1 = fidelity_pure(PureStateVector((phase * v).eval()), rho);
    CHECK(std::abs(f0 - f1) <= 1e-12);
}
