#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "hinf/oracle.hpp"
#include "support/test_systems.hpp"

using namespace hinf;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

StateSpace scalar_system(double a, double b, double c, double d) {
  return StateSpace(CMat::Constant(1, 1, a), CMat::Constant(1, 1, b),
                    CMat::Constant(1, 1, c), CMat::Constant(1, 1, d));
}

}  // namespace

TEST_CASE("grid_norm") {
  SECTION("flat response") {
    const GridPeak peak = grid_norm(scalar_system(0, 0, 1, 1), FrequencyBand::full());
    CHECK(peak.gain_star == Approx(1.0).margin(1e-12));
  }

  SECTION("scalar lag peaks at zero") {
    const GridPeak peak = grid_norm(scalar_system(0.5, 1, 1, 0), FrequencyBand::full());
    CHECK(peak.theta_star == Approx(0.0).margin(1e-6));
    CHECK(peak.gain_star == Approx(2.0).margin(1e-10));
  }

  SECTION("high band boundary maximizer") {
    const GridPeak peak =
        grid_norm(scalar_system(0.5, 1, 1, 0), FrequencyBand::high(kPi / 2));
    CHECK(std::abs(peak.theta_star) == Approx(kPi / 2).margin(1e-6));
    CHECK(peak.gain_star == Approx(std::sqrt(0.8)).margin(1e-10));
  }

  SECTION("middle band, asymmetric") {
    const GridPeak peak =
        grid_norm(scalar_system(0.5, 1, 1, 0), FrequencyBand::middle(0.5, 2.0));
    CHECK(peak.theta_star == Approx(0.5).margin(1e-6));
    CHECK(peak.gain_star == Approx(gain(scalar_system(0.5, 1, 1, 0), 0.5)).margin(1e-10));
  }

  SECTION("guards") {
    CHECK_THROWS_AS(grid_norm(scalar_system(0.5, 1, 1, 0), FrequencyBand::full(), 32),
                    InputError);
    CHECK_THROWS_AS(grid_norm(scalar_system(1.05, 1, 1, 0), FrequencyBand::full()),
                    StabilityError);
  }

  SECTION("monotonicity: band peak never exceeds the full peak") {
    testing::Rng rng(37);
    for (int t = 0; t < 5; ++t) {
      const StateSpace sys = testing::random_stable_system(rng, 4, 2, 2, 0.88);
      const double full = grid_norm(sys, FrequencyBand::full()).gain_star;
      CHECK(grid_norm(sys, FrequencyBand::low(1.0)).gain_star <= full + 1e-8);
      CHECK(grid_norm(sys, FrequencyBand::high(2.0)).gain_star <= full + 1e-8);
      CHECK(grid_norm(sys, FrequencyBand::middle(-0.5, 1.7)).gain_star <= full + 1e-8);
    }
  }

  SECTION("agrees with analyze frequency on a sharp unique peak") {
    testing::Rng rng(41);
    const StateSpace sys = testing::random_stable_system(rng, 4, 2, 2, 0.9);
    const GridPeak peak = grid_norm(sys, FrequencyBand::full());
    const AnalysisResult res = analyze(sys, FrequencyBand::full());
    CHECK(std::abs(res.certificate.theta_opt - peak.theta_star) <= 1e-3);
  }
}

TEST_CASE("verify_certificate") {
  SECTION("memoryless certificate is exact") {
    const AnalysisResult res = analyze(scalar_system(0, 0, 1, 1), FrequencyBand::full());
    const VerifyResult v = verify_certificate(scalar_system(0, 0, 1, 1),
                                              res.certificate, 100);
    CHECK(v.power == Approx(1.0).margin(1e-9));  // simulation is exact
    CHECK(v.relative_error <= 1e-6);  // claimed mu carries solver slack
  }

  SECTION("scalar lag converges within the transient bound") {
    const StateSpace sys = scalar_system(0.5, 1, 1, 0);
    const AnalysisResult res = analyze(sys, FrequencyBand::full());
    const VerifyResult v = verify_certificate(sys, res.certificate, 10000);
    CHECK(v.relative_error <= 1e-2);
  }

  SECTION("zero system") {
    const StateSpace sys = scalar_system(0.5, 1, 0, 0);
    const AnalysisResult res = analyze(sys, FrequencyBand::full());
    const VerifyResult v = verify_certificate(sys, res.certificate, 100);
    CHECK(v.power == 0.0);
  }

  SECTION("unnormalized certificates are rejected") {
    RankOneCertificate bad;
    bad.x_opt = CVec::Zero(1);
    bad.w_opt = CVec::Constant(1, 2.0);
    CHECK_THROWS_AS(verify_certificate(scalar_system(0.5, 1, 1, 0), bad, 10),
                    InputError);
  }
}
