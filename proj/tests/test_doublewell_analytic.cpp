#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "tdi/correlations.hpp"
#include "tdi/doublewell_analytic.hpp"

using namespace tdi;
using testsupport::kPi;

namespace {

DoubleWellState make_state(double p_left, Complex gamma, double omega = 1.0) {
  DoubleWellState state;
  state.p_left = p_left;
  state.gamma = gamma;
  state.omega = omega;
  state.d = Vec3(1.0, 0.0, 0.0);
  return state;
}

}  // namespace

TEST_CASE("state validation and model conversion") {
  const DoubleWellState state = make_state(0.6, Complex(0.2, -0.1), 1.4);
  CHECK_NOTHROW(state.validate());
  const TargetModel model = state.to_model();
  CHECK(std::abs(model.initial(0, 0) - Complex(0.6, 0.0)) < 1e-15);
  CHECK(std::abs(model.initial(0, 1) - Complex(0.2, -0.1)) < 1e-15);

  DoubleWellState broken = make_state(0.5, Complex(0.7, 0.0));
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("trigonometric factors satisfy their identities") {
  for (double omega : {0.5, 1.0, 2.3}) {
    for (double dt : {0.0, 0.4, 1.7, 6.1}) {
      const TrigFactors f = TrigFactors::at(omega, dt);
      CHECK(std::abs(f.s * f.s + f.c * f.c - 1.0) < 1e-14);
      CHECK(std::abs(f.s_full - 2.0 * f.s * f.c) < 1e-14);
    }
  }
}

TEST_CASE("pair correlations: the +-d closed forms match the engine exactly") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 15; ++trial) {
    const double p_left = testsupport::uniform(rng, 0.1, 0.9);
    const DoubleWellState state =
        make_state(p_left, testsupport::random_gamma(p_left, rng),
                   testsupport::uniform(rng, 0.4, 2.5));
    const double dt = testsupport::uniform(rng, 0.0, 8.0);
    for (Separation sep : {Separation::minus_d, Separation::plus_d}) {
      const AnalyticComparison c = dcf_analytic(state, dt, sep);
      CHECK(c.abs_diff < 1e-12);
      CHECK(std::abs(c.literal - c.oracle) < 1e-12);
    }
  }
}

TEST_CASE("same-site correlation: first-power literal vs squared oracle") {
  // p = 1/2, gamma = 0.3, quarter period: literal c - i s_full Re(gamma)
  // = sqrt(2)/2 - 0.3 i, engine value c^2 - i s_full Re(gamma) = 0.5 - 0.3 i.
  const DoubleWellState state = make_state(0.5, Complex(0.3, 0.0));
  const AnalyticComparison c = dcf_analytic(state, kPi / 2.0, Separation::zero);
  CHECK(std::abs(c.literal - Complex(std::sqrt(2.0) / 2.0, -0.3)) < 1e-12);
  CHECK(std::abs(c.oracle - Complex(0.5, -0.3)) < 1e-12);
  CHECK(c.abs_diff == doctest::Approx(std::sqrt(2.0) / 2.0 - 0.5).epsilon(1e-10));
  // the square substitution repairs the literal form exactly
  CHECK(std::abs(c.literal_squared - c.oracle) < 1e-12);
}

TEST_CASE("scattering-function closed form") {
  SUBCASE("coherence-free point matches exactly") {
    // p_left = 0.8, gamma = 0, quarter period, p.d = pi/2 -> 0.5 + 0.3 i.
    const DoubleWellState state = make_state(0.8, 0.0);
    const AnalyticComparison c =
        isf_analytic(state, kPi / 2.0, Vec3(kPi / 2.0, 0.0, 0.0));
    CHECK(std::abs(c.literal - Complex(0.5, 0.3)) < 1e-12);
    CHECK(std::abs(c.oracle - Complex(0.5, 0.3)) < 1e-12);
    CHECK(c.abs_diff < 1e-12);
  }
  SUBCASE("real parts agree for any coherence") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 20; ++trial) {
      const double p_left = testsupport::uniform(rng, 0.1, 0.9);
      const DoubleWellState state = make_state(p_left, testsupport::random_gamma(p_left, rng));
      const double dt = testsupport::uniform(rng, 0.0, 6.0);
      const Vec3 p(testsupport::uniform(rng, 0.0, 2.0 * kPi), 0.0, 0.0);
      const AnalyticComparison c = isf_analytic(state, dt, p);
      CHECK(std::abs(c.literal.real() - c.oracle.real()) < 1e-11);
    }
  }
  SUBCASE("imaginary parts differ by the documented coherence term") {
    // literal - oracle = -(s_full/2)(Im(g) sin(p.d) + Re(g) cos(p.d)).
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 20; ++trial) {
      const double p_left = testsupport::uniform(rng, 0.1, 0.9);
      const DoubleWellState state = make_state(p_left, testsupport::random_gamma(p_left, rng));
      const double dt = testsupport::uniform(rng, 0.0, 6.0);
      const double pd = testsupport::uniform(rng, 0.0, 2.0 * kPi);
      const AnalyticComparison c = isf_analytic(state, dt, Vec3(pd, 0.0, 0.0));
      const TrigFactors f = TrigFactors::at(state.omega, dt);
      const double predicted = -(f.s_full / 2.0) * (state.gamma.imag() * std::sin(pd) +
                                                    state.gamma.real() * std::cos(pd));
      CHECK(std::abs((c.literal.imag() - c.oracle.imag()) - predicted) < 1e-11);
    }
  }
}

TEST_CASE("time-averaged scattering function frozen point") {
  // gamma = 0.4, quarter period, p.d = pi: literal -0.6 i, engine -0.8 i.
  const DoubleWellState state = make_state(0.5, Complex(0.4, 0.0));
  const AnalyticComparison c = averaged_isf(state, kPi / 2.0, Vec3(kPi, 0.0, 0.0));
  CHECK(std::abs(c.literal - Complex(0.0, -0.6)) < 1e-12);
  CHECK(std::abs(c.oracle - Complex(0.0, -0.8)) < 1e-10);
  CHECK(c.abs_diff == doctest::Approx(0.2).epsilon(1e-8));
}

TEST_CASE("time-averaged pair correlations") {
  SUBCASE("frozen cross-pair point: s/2 literal vs s^2/2 engine") {
    const DoubleWellState state = make_state(0.5, Complex(0.0, 0.4));
    const AnalyticComparison c = averaged_dcf(state, kPi / 2.0, Separation::plus_d);
    CHECK(std::abs(c.literal - Complex(0.5 * std::sqrt(2.0) / 2.0, 0.0)) < 1e-12);
    CHECK(std::abs(c.oracle - Complex(0.25, 0.0)) < 1e-10);
    CHECK(std::abs(c.literal_squared - c.oracle) < 1e-10);
  }
  SUBCASE("square substitution repairs every separation on a grid") {
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 12; ++trial) {
      const double p_left = testsupport::uniform(rng, 0.1, 0.9);
      const DoubleWellState state = make_state(p_left, testsupport::random_gamma(p_left, rng),
                                               testsupport::uniform(rng, 0.5, 2.0));
      const double dt = testsupport::uniform(rng, 0.0, 5.0);
      for (Separation sep : {Separation::minus_d, Separation::zero, Separation::plus_d}) {
        const AnalyticComparison c = averaged_dcf(state, dt, sep);
        CHECK(std::abs(c.literal_squared - c.oracle) < 1e-9);
      }
    }
  }
}

TEST_CASE("closed forms extend to a nonzero first time via the evolved state") {
  // G(r, t1, t1+dt) equals the t1 = 0 closed form evaluated on the state at
  // t1 -- the only t1 dependence enters through (p_left, gamma).
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 10; ++trial) {
    const double p_left = testsupport::uniform(rng, 0.1, 0.9);
    const DoubleWellState state = make_state(p_left, testsupport::random_gamma(p_left, rng),
                                             testsupport::uniform(rng, 0.5, 2.0));
    const TargetModel model = state.to_model();
    const double t1 = testsupport::uniform(rng, 0.0, 5.0);
    const double dt = testsupport::uniform(rng, 0.0, 5.0);

    const Operator mu_t1 = state_at(model, t1);
    DoubleWellState shifted = state;
    shifted.p_left = mu_t1(0, 0).real();
    shifted.gamma = mu_t1(0, 1);

    const Complex engine = dcf(model, state.d, t1, t1 + dt);
    const AnalyticComparison closed = dcf_analytic(shifted, dt, Separation::plus_d);
    CHECK(std::abs(engine - closed.oracle) < 1e-11);
  }
}

TEST_CASE("real coherence is conserved along the evolution") {
  const DoubleWellState state = make_state(0.7, Complex(0.25, -0.35), 1.3);
  std::vector<double> grid;
  const double period = 2.0 * kPi / state.omega;
  for (int j = 0; j <= 128; ++j) grid.push_back(2.0 * period * j / 128.0);
  CHECK(gamma_r_invariant(state, grid) < 1e-12);
}
