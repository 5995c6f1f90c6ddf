#include <catch2/catch_amalgamated.hpp>

#include "hinf/hermitian.hpp"
#include "support/test_systems.hpp"

using namespace hinf;
using Catch::Approx;

namespace {

// Embedding of a general (not necessarily Hermitian) complex matrix,
// used to state the homomorphism property.
RMat embed_general(const CMat& m) {
  const Eigen::Index k = m.rows();
  RMat out(2 * k, 2 * k);
  out.topLeftCorner(k, k) = m.real();
  out.topRightCorner(k, k) = -m.imag();
  out.bottomLeftCorner(k, k) = m.imag();
  out.bottomRightCorner(k, k) = m.real();
  return out;
}

}  // namespace

TEST_CASE("symmetrize") {
  CMat h(2, 2);
  h << Complex(1, 0), Complex(0, 1), Complex(0, -1), Complex(3, 0);
  CHECK((symmetrize(h).mat() - h).norm() == 0.0);  // fixed point

  CMat upper(2, 2);
  upper << 0, 1, 0, 0;
  CMat expected(2, 2);
  expected << 0, 0.5, 0.5, 0;
  CHECK((symmetrize(upper).mat() - expected).norm() == 0.0);

  CHECK(symmetrize(CMat::Constant(1, 1, Complex(0, 1))).mat()(0, 0) ==
        Complex(0, 0));

  CHECK_THROWS_AS(HermitianMatrix(CMat::Zero(2, 3)), DimensionError);
}

TEST_CASE("psd_sqrt") {
  SECTION("identity and scalars") {
    const CMat s = psd_sqrt(HermitianMatrix::identity(3), 1e-12);
    CHECK((s * s.adjoint() - CMat::Identity(3, 3)).norm() < 1e-14);
    CHECK(psd_sqrt(HermitianMatrix(CMat::Constant(1, 1, 4.0)), 1e-12)(0, 0).real() ==
          Approx(2.0));
  }

  SECTION("rank-one reconstruction") {
    CVec v(2);
    v << Complex(1, 0), Complex(0, 1);
    const HermitianMatrix h(CMat(v * v.adjoint()));
    const CMat s = psd_sqrt(h, 1e-12);
    CHECK((s * s.adjoint() - h.mat()).norm() < 1e-12);
    CHECK(numerical_rank(s) == 1);
  }

  SECTION("negative eigenvalues beyond tol are rejected") {
    CHECK_THROWS_AS(psd_sqrt(HermitianMatrix(CMat::Constant(1, 1, -1.0)), 1e-8),
                    NotPsdError);
    // ... but slack within tol is clipped.
    const CMat s = psd_sqrt(HermitianMatrix(CMat::Constant(1, 1, -1e-10)), 1e-8);
    CHECK(s(0, 0) == Complex(0, 0));
  }

  SECTION("reconstruction bound on random PSD matrices") {
    testing::Rng rng(5);
    for (int t = 0; t < 20; ++t) {
      const CMat g = testing::random_complex(rng, 4, 4);
      const HermitianMatrix h(CMat(g * g.adjoint()));
      const double tol = 1e-12 * h.mat().norm();
      const CMat s = psd_sqrt(h, tol);
      CHECK((s * s.adjoint() - h.mat()).norm() <= 10 * tol * h.mat().norm() + 1e-13);
    }
  }
}

TEST_CASE("embed_real") {
  SECTION("real matrices embed block-diagonally") {
    CMat h(2, 2);
    h << 2, 1, 1, 3;
    const RMat e = embed_real(HermitianMatrix(h));
    CHECK((e.topRightCorner(2, 2)).norm() == 0.0);
    CHECK((e.topLeftCorner(2, 2) - h.real()).norm() == 0.0);
    CHECK((e.bottomRightCorner(2, 2) - h.real()).norm() == 0.0);
  }

  SECTION("eigenvalues double in multiplicity") {
    CMat h(2, 2);
    h << Complex(1, 0), Complex(0, 1), Complex(0, -1), Complex(1, 0);
    Eigen::SelfAdjointEigenSolver<RMat> es(embed_real(HermitianMatrix(h)));
    RVec lam = es.eigenvalues();
    CHECK(lam(0) == Approx(0.0).margin(1e-14));
    CHECK(lam(1) == Approx(0.0).margin(1e-14));
    CHECK(lam(2) == Approx(2.0));
    CHECK(lam(3) == Approx(2.0));
  }

  SECTION("trace doubles") {
    CHECK(embed_real(HermitianMatrix(CMat::Constant(1, 1, 3.0))).trace() ==
          Approx(6.0));
  }

  SECTION("homomorphism on products") {
    testing::Rng rng(17);
    for (int t = 0; t < 10; ++t) {
      const HermitianMatrix h1 = symmetrize(testing::random_complex(rng, 3, 3));
      const HermitianMatrix h2 = symmetrize(testing::random_complex(rng, 3, 3));
      const RMat lhs = embed_general(h1.mat() * h2.mat());
      const RMat rhs = embed_real(h1) * embed_real(h2);
      CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }
  }

  SECTION("deembed inverts and projects") {
    testing::Rng rng(19);
    const HermitianMatrix h = symmetrize(testing::random_complex(rng, 3, 3));
    CHECK((deembed_real(embed_real(h)).mat() - h.mat()).norm() < 1e-14);

    // Pairings with embedded Hermitian data survive the projection.
    const RMat x = RMat(testing::random_complex(rng, 6, 6).real()).selfadjointView<Eigen::Lower>();
    const HermitianMatrix e = symmetrize(testing::random_complex(rng, 3, 3));
    const double direct = 0.5 * (embed_real(e).cwiseProduct(x)).sum();
    const double projected = herm_inner(e, deembed_real(x));
    CHECK(direct == Approx(projected).margin(1e-12));
  }
}

TEST_CASE("numerical_rank") {
  CHECK(numerical_rank(CMat::Zero(3, 3)) == 0);

  CMat diag = CMat::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 1e-15;
  CHECK(numerical_rank(diag, 1e-9) == 1);

  testing::Rng rng(23);
  const CVec v = testing::random_complex_vec(rng, 4);
  CHECK(numerical_rank(CMat(v * v.adjoint())) == 1);
  CHECK(numerical_rank(CMat(psd_sqrt(HermitianMatrix(CMat(v * v.adjoint())), 1e-12))) == 1);
}

TEST_CASE("pinv") {
  CHECK((pinv(CMat::Identity(3, 3)) - CMat::Identity(3, 3)).norm() < 1e-14);
  CHECK(pinv(CMat::Constant(1, 1, 2.0))(0, 0).real() == Approx(0.5));

  SECTION("Penrose identity on random rectangular matrices") {
    testing::Rng rng(29);
    for (int t = 0; t < 10; ++t) {
      const CMat m = testing::random_complex(rng, 4, 3);
      const CMat mp = pinv(m);
      CHECK((m * mp * m - m).norm() <= 1e-10 * m.norm());
      CHECK((mp * m * mp - mp).norm() <= 1e-10 * mp.norm());
    }
  }

  SECTION("rank-deficient truncation") {
    testing::Rng rng(31);
    const CVec v = testing::random_complex_vec(rng, 3);
    const CMat m = v * v.adjoint();
    const CMat mp = pinv(m);
    CHECK((m * mp * m - m).norm() <= 1e-10 * m.norm());
  }
}
