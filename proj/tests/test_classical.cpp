#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "tdi/classical.hpp"

using namespace tdi;
using testsupport::kPi;

namespace {

/// Closed-form scattering function of the symmetric two-site hopper started
/// in equilibrium: S = P_same + P_diff cos(p.d), P_diff = (1 - e^{-2 k dt})/2.
double hopper_isf(double rate, double dt, double pd) {
  const double p_diff = 0.5 * (1.0 - std::exp(-2.0 * rate * dt));
  return (1.0 - p_diff) + p_diff * std::cos(pd);
}

}  // namespace

TEST_CASE("model validation catches ill-formed jump processes") {
  ClassicalModel model = build_classical_hopper(1.0, Vec3(1, 0, 0), 0.5, 1);
  CHECK_NOTHROW(model.validate());

  SUBCASE("negative rate") {
    model.rates[0][1] = -0.2;
    CHECK_THROWS_AS(model.validate(), std::invalid_argument);
  }
  SUBCASE("nonzero diagonal") {
    model.rates[0][0] = 0.3;
    CHECK_THROWS_AS(model.validate(), std::invalid_argument);
  }
  SUBCASE("occupations must sum to one") {
    model.initial = {0.3, 0.3};
    CHECK_THROWS_AS(model.validate(), std::invalid_argument);
  }
  SUBCASE("duplicate positions") {
    model.positions[1] = model.positions[0];
    CHECK_THROWS_AS(model.validate(), std::invalid_argument);
  }
  SUBCASE("bad occupation probability in the builder") {
    CHECK_THROWS_AS(build_classical_hopper(1.0, Vec3(1, 0, 0), 1.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_classical_hopper(-1.0, Vec3(1, 0, 0), 0.5, 1), std::invalid_argument);
  }
}

TEST_CASE("substream seeds are deterministic and spread out") {
  CHECK(substream_seed(1, 0, 0) == substream_seed(1, 0, 0));
  CHECK(substream_seed(1, 0, 0) != substream_seed(1, 1, 0));
  CHECK(substream_seed(1, 0, 0) != substream_seed(1, 0, 1));
  CHECK(substream_seed(1, 0, 0) != substream_seed(2, 0, 0));
}

TEST_CASE("trajectory sampler") {
  SUBCASE("zero rates freeze the walker at its initial site") {
    ClassicalModel frozen = build_classical_hopper(0.0, Vec3(1, 0, 0), 1.0, 5);
    const std::vector<std::size_t> path = sample_path(frozen, {0.0, 1.0, 10.0, 100.0}, 12345);
    for (std::size_t site : path) CHECK(site == 0);
  }
  SUBCASE("identical stream seeds reproduce the path") {
    const ClassicalModel model = build_classical_hopper(0.9, Vec3(1, 0, 0), 0.5, 5);
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0, 4.0};
    CHECK(sample_path(model, times, 777) == sample_path(model, times, 777));
  }
  SUBCASE("query times must be sorted and nonnegative") {
    const ClassicalModel model = build_classical_hopper(0.9, Vec3(1, 0, 0), 0.5, 5);
    CHECK_THROWS_AS(sample_path(model, {1.0, 0.5}, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_path(model, {-1.0, 0.5}, 1), std::invalid_argument);
  }
  SUBCASE("site-pair sampling is deterministic in (seed, salt)") {
    const ClassicalModel model = build_classical_hopper(0.9, Vec3(1, 0, 0), 0.5, 5);
    const auto a = sample_site_pairs(model, 0.3, 1.2, 500, 3);
    const auto b = sample_site_pairs(model, 0.3, 1.2, 500, 3);
    const auto c = sample_site_pairs(model, 0.3, 1.2, 500, 4);
    CHECK(a == b);
    CHECK(a != c);
  }
}

TEST_CASE("exact rate-generator evaluation matches the closed form of the hopper") {
  for (double rate : {0.2, 0.7, 1.5}) {
    const ClassicalModel model = build_classical_hopper(rate, Vec3(1, 0, 0), 0.5, 1);
    for (double dt : {0.0, 0.4, 1.3}) {
      for (double pd : {0.0, kPi / 3.0, kPi}) {
        const Vec3 p(pd, 0.0, 0.0);
        const Complex exact = classical_isf_exact(model, p, 0.25, 0.25 + dt);
        CHECK(std::abs(exact - Complex(hopper_isf(rate, dt, pd), 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("exact evaluation obeys the time-conjugation identity") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 8; ++trial) {
    const ClassicalModel model = testsupport::random_classical(rng, 60 + trial);
    const Vec3 p = testsupport::random_momentum(rng);
    const double t1 = testsupport::uniform(rng, 0.0, 2.0);
    const double t2 = testsupport::uniform(rng, 0.0, 2.0);
    const Complex forward = classical_isf_exact(model, p, t1, t2);
    const Complex swapped = classical_isf_exact(model, p, t2, t1);
    CHECK(std::abs(forward - std::conj(swapped)) < 1e-12);
  }
}

TEST_CASE("Monte Carlo estimate converges to the exact value within its error bars") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 6; ++trial) {
    const ClassicalModel model = testsupport::random_classical(rng, 100 + trial);
    const Vec3 p = testsupport::random_momentum(rng);
    const double t1 = testsupport::uniform(rng, 0.0, 1.5);
    const double t2 = t1 + testsupport::uniform(rng, 0.0, 1.5);
    const MCEstimate estimate = classical_isf(model, p, t1, t2, 20000);
    const Complex exact = classical_isf_exact(model, p, t1, t2);
    // 5 sigma two-component bound; the error components are strictly positive
    // for any nondegenerate sampling distribution.
    CHECK(std::abs(estimate.mean.real() - exact.real()) <
          5.0 * std::max(estimate.std_error_re, 1e-6));
    CHECK(std::abs(estimate.mean.imag() - exact.imag()) <
          5.0 * std::max(estimate.std_error_im, 1e-6));
    CHECK(estimate.n_traj == 20000);
  }
}

TEST_CASE("Monte Carlo runs are reproducible and seed-sensitive") {
  const ClassicalModel model = build_classical_hopper(0.8, Vec3(1, 0, 0), 0.5, 21);
  const Vec3 p(1.1, 0.0, 0.0);
  const MCEstimate a = classical_isf(model, p, 0.0, 1.0, 4000);
  const MCEstimate b = classical_isf(model, p, 0.0, 1.0, 4000);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error_re == b.std_error_re);

  ClassicalModel reseeded = model;
  reseeded.seed = 22;
  const MCEstimate c = classical_isf(reseeded, p, 0.0, 1.0, 4000);
  CHECK(a.mean != c.mean);

  const MCEstimate salted = classical_isf_salted(model, p, 0.0, 1.0, 4000, 9);
  CHECK(a.mean != salted.mean);
  CHECK(std::abs(salted.mean - a.mean) < 5.0 * (a.std_error() + salted.std_error()));
}

TEST_CASE("equal times give exactly one regardless of momentum") {
  const ClassicalModel model = build_classical_hopper(0.8, Vec3(1, 0, 0), 0.3, 2);
  const Vec3 p(2.7, 0.0, 0.0);
  CHECK(std::abs(classical_isf_exact(model, p, 0.7, 0.7) - Complex(1.0, 0.0)) < 1e-12);
  const MCEstimate mc = classical_isf(model, p, 0.7, 0.7, 100);
  CHECK(std::abs(mc.mean - Complex(1.0, 0.0)) < 1e-12);
  CHECK(mc.std_error() < 1e-12);
}
