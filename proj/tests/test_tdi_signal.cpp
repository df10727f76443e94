#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "tdi/correlations.hpp"
#include "tdi/tdi_signal.hpp"

using namespace tdi;
using testsupport::kPi;

namespace {

TDIConfig config_at(const Vec3& p, double t1, double t2, double phi) {
  TDIConfig cfg;
  cfg.p = p;
  cfg.t1 = t1;
  cfg.t2 = t2;
  cfg.phi = phi;
  return cfg;
}

}  // namespace

TEST_CASE("detection probability at equal scattering times") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const TargetModel model = testsupport::random_model(rng);
    const Vec3 p = testsupport::random_momentum(rng);
    const double t = testsupport::uniform(rng, 0.0, 3.0);
    const double s = isf(model, p, t, t).value.real();
    // constructive: both branches identical, so P = 4 S(p,t,t)
    CHECK(std::abs(detection_probability(model, config_at(p, t, t, 0.0)) - 4.0 * s) < 1e-10);
    // destructive: opposite phase cancels the amplitudes exactly
    CHECK(std::abs(detection_probability(model, config_at(p, t, t, kPi))) < 1e-10);
  }
}

TEST_CASE("detection probability equals the scattering-function assembly") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    const TargetModel model = testsupport::random_model(rng);
    const Vec3 p = testsupport::random_momentum(rng);
    const double t1 = testsupport::uniform(rng, 0.0, 2.0);
    const double t2 = t1 + testsupport::uniform(rng, 0.0, 2.0);
    const double phi = testsupport::uniform(rng, 0.0, 2.0 * kPi);
    const Complex s12 = isf(model, p, t1, t2).value;
    const double s11 = isf(model, p, t1, t1).value.real();
    const double s22 = isf(model, p, t2, t2).value.real();
    const double expected = s11 + s22 + 2.0 * std::real(std::exp(Complex(0, phi)) * s12);
    CHECK(std::abs(detection_probability(model, config_at(p, t1, t2, phi)) - expected) < 1e-10);
  }
}

TEST_CASE("detection probability is nonnegative") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const TargetModel model = testsupport::random_model(rng);
    const Vec3 p = testsupport::random_momentum(rng);
    const double t1 = testsupport::uniform(rng, 0.0, 3.0);
    const double t2 = t1 + testsupport::uniform(rng, 0.0, 3.0);
    const double phi = testsupport::uniform(rng, 0.0, 2.0 * kPi);
    CHECK(detection_probability(model, config_at(p, t1, t2, phi)) >= -1e-12);
  }
}

TEST_CASE("phase-conjugate pair sums to a phase-independent constant") {
  const TargetModel model = build_double_well(1.0, Vec3(1, 0, 0), 0.6, Complex(0.3, 0.2));
  const Vec3 p(1.7, 0.0, 0.0);
  const double reference = detection_probability(model, config_at(p, 0.2, 1.4, 0.0)) +
                           detection_probability(model, config_at(p, 0.2, 1.4, kPi));
  for (double phi : make_phase_grid(12)) {
    const double total = detection_probability(model, config_at(p, 0.2, 1.4, phi)) +
                         detection_probability(model, config_at(p, 0.2, 1.4, phi + kPi));
    CHECK(std::abs(total - reference) < 1e-10);
  }
}

TEST_CASE("interference-term variants differ by exactly sin(phi) Im S") {
  const TargetModel model = build_double_well(1.0, Vec3(1, 0, 0), 0.7, Complex(0.2, -0.1));
  const Vec3 p(2.0, 0.0, 0.0);
  for (double phi : make_phase_grid(8)) {
    const TDIConfig cfg = config_at(p, 0.0, 1.2, phi);
    const ProbabilityFormula f = detection_probability_formula(model, cfg);
    const Complex s = isf(model, p, 0.0, 1.2).value;
    CHECK(std::abs(f.difference - std::sin(phi) * s.imag()) < 1e-12);
    CHECK(std::abs(f.derived - detection_probability(model, cfg)) < 1e-12);
    CHECK(std::abs((f.literal - f.derived) - f.difference) < 1e-14);
  }
}

TEST_CASE("gaussian and exponential envelopes scale the probability") {
  const TargetModel model = build_double_well(1.0, Vec3(1, 0, 0), 0.5, 0.0);
  TDIConfig cfg = config_at(Vec3(1.0, 0, 0), 0.0, 1.0, 0.3);
  const double bare = detection_probability(model, cfg, 2.0);

  cfg.envelope.kind = EnvelopeModel::Kind::exponential;
  cfg.envelope.lifetime = 4.0;
  const double damped = detection_probability(model, cfg, 2.0);
  CHECK(std::abs(damped - bare * std::exp(-2.0 * 2.0 / 4.0)) < 1e-12);
  CHECK(detection_probability(model, cfg, -1.0) == 0.0);  // causal envelope

  cfg.envelope.kind = EnvelopeModel::Kind::gaussian;
  cfg.envelope.width = 1.5;
  const double gauss = detection_probability(model, cfg, 2.0);
  // probability scales with the square of the envelope value
  CHECK(std::abs(gauss - bare * std::exp(-2.0 * 4.0 / (2.0 * 1.5 * 1.5))) < 1e-12);

  cfg.envelope.width = -1.0;
  CHECK_THROWS_AS(cfg.envelope.validate(), std::invalid_argument);
}

TEST_CASE("sum and difference channels of the coherent two-site target") {
  // Real coherence 0.4, quarter period, p.d = pi/2: the sine amplitude of the
  // sum channel is 1.6 and the channel value at phi = pi/2 is 5.6.
  const TargetModel model = build_double_well(1.0, Vec3(1, 0, 0), 0.5, Complex(0.4, 0.0));
  const Vec3 p(kPi / 2.0, 0.0, 0.0);

  SUBCASE("frozen point at phi = pi/2") {
    const IntensityPair pair = intensity_pm(model, config_at(p, 0.0, kPi / 2.0, kPi / 2.0));
    CHECK(std::abs(pair.i_sum - 5.6) < 1e-12);
  }
  SUBCASE("channels assemble from the scattering function at opposite momenta") {
    for (double phi : make_phase_grid(8)) {
      const IntensityPair pair = intensity_pm(model, config_at(p, 0.0, kPi / 2.0, phi));
      const double p_plus = detection_probability(model, config_at(p, 0.0, kPi / 2.0, phi));
      const double p_minus = detection_probability(model, config_at(-p, 0.0, kPi / 2.0, phi));
      CHECK(std::abs(pair.i_sum - (p_plus + p_minus)) < 1e-12);
      CHECK(std::abs(pair.i_diff - (p_plus - p_minus)) < 1e-12);
    }
  }
  SUBCASE("doubling the coherence doubles the sine amplitude") {
    const TargetModel twice = build_double_well(1.0, Vec3(1, 0, 0), 0.5, Complex(0.2, 0.0));
    const PhaseScan scan_1 = phase_scan(twice, p, 0.0, kPi / 2.0, make_phase_grid(8));
    const TargetModel base = model;
    const PhaseScan scan_2 = phase_scan(base, p, 0.0, kPi / 2.0, make_phase_grid(8));
    const HarmonicFit fit_1 = [&] {
      std::vector<double> phi, y;
      for (const auto& row : scan_1.rows) phi.push_back(row.phi), y.push_back(row.i_sum);
      return fit_harmonic(phi, y);
    }();
    const HarmonicFit fit_2 = [&] {
      std::vector<double> phi, y;
      for (const auto& row : scan_2.rows) phi.push_back(row.phi), y.push_back(row.i_sum);
      return fit_harmonic(phi, y);
    }();
    CHECK(std::abs(fit_2.c_sin - 2.0 * fit_1.c_sin) < 1e-10);
    CHECK(std::abs(fit_2.c_sin) == doctest::Approx(1.6).epsilon(1e-10));
  }
}

TEST_CASE("classical channel predictions match the exact-scan implementation") {
  const ClassicalModel model = build_classical_hopper(0.6, Vec3(1, 0, 0), 0.5, 3);
  const Vec3 p(1.3, 0.0, 0.0);
  const std::vector<double> grid = make_phase_grid(8);
  const PhaseScan scan = classical_phase_scan(model, p, 0.1, 1.1, grid);
  CHECK_FALSE(scan.statistical);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    TDIConfig cfg = config_at(p, 0.1, 1.1, grid[j]);
    const IntensityPair expected = classical_intensity_pm(model, cfg);
    CHECK(std::abs(scan.rows[j].i_sum - expected.i_sum) < 1e-12);
    CHECK(std::abs(scan.rows[j].i_diff - expected.i_diff) < 1e-12);
    CHECK(scan.rows[j].std_error_sum == 0.0);
  }
  SUBCASE("difference channel is a pure negative sine in the phase") {
    const Complex s = classical_isf_exact(model, p, 0.1, 1.1);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      CHECK(std::abs(scan.rows[j].i_diff - (-4.0 * std::sin(grid[j]) * s.imag())) < 1e-12);
    }
  }
}

TEST_CASE("statistical classical scan agrees with the exact scan within errors") {
  const ClassicalModel model = build_classical_hopper(0.9, Vec3(1, 0, 0), 0.5, 11);
  const Vec3 p(2.1, 0.0, 0.0);
  const std::vector<double> grid = make_phase_grid(8);
  const PhaseScan exact = classical_phase_scan(model, p, 0.0, 0.8, grid);
  const PhaseScan sampled = classical_phase_scan_mc(model, p, 0.0, 0.8, grid, 20000);
  REQUIRE(sampled.rows.size() == grid.size());
  CHECK(sampled.statistical);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(sampled.rows[j].std_error_sum > 0.0);
    CHECK(std::abs(sampled.rows[j].i_sum - exact.rows[j].i_sum) <
          5.0 * sampled.rows[j].std_error_sum);
    CHECK(std::abs(sampled.rows[j].i_diff - exact.rows[j].i_diff) <
          5.0 * sampled.rows[j].std_error_diff);
  }
  SUBCASE("reruns are bitwise identical") {
    const PhaseScan again = classical_phase_scan_mc(model, p, 0.0, 0.8, grid, 20000);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      CHECK(again.rows[j].i_sum == sampled.rows[j].i_sum);
      CHECK(again.rows[j].i_diff == sampled.rows[j].i_diff);
    }
  }
}

TEST_CASE("harmonic fit recovers exact coefficients and propagates errors") {
  const std::vector<double> grid = make_phase_grid(8);
  std::vector<double> y;
  for (double phi : grid) y.push_back(1.5 - 0.7 * std::cos(phi) + 2.25 * std::sin(phi));

  SUBCASE("noise-free fit is exact with zero errors") {
    const HarmonicFit fit = fit_harmonic(grid, y);
    CHECK(std::abs(fit.c0 - 1.5) < 1e-12);
    CHECK(std::abs(fit.c_cos + 0.7) < 1e-12);
    CHECK(std::abs(fit.c_sin - 2.25) < 1e-12);
    CHECK(fit.err_c0 == 0.0);
    CHECK(fit.err_sin == 0.0);
  }
  SUBCASE("uniform row errors propagate with the orthogonal-design factors") {
    // n-point uniform grid: var(c0) = s^2/n, var(c_cos) = var(c_sin) = 2 s^2/n.
    const std::vector<double> errors(grid.size(), 0.3);
    const HarmonicFit fit = fit_harmonic(grid, y, errors);
    CHECK(std::abs(fit.err_c0 - 0.3 / std::sqrt(8.0)) < 1e-12);
    CHECK(std::abs(fit.err_cos - 0.3 * std::sqrt(2.0 / 8.0)) < 1e-12);
    CHECK(std::abs(fit.err_sin - 0.3 * std::sqrt(2.0 / 8.0)) < 1e-12);
  }
  SUBCASE("degenerate grids are rejected") {
    CHECK_THROWS_AS(fit_harmonic({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_harmonic({0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_harmonic(grid, std::vector<double>(3, 1.0)), std::invalid_argument);
  }
}

TEST_CASE("classicality discriminator") {
  const Vec3 p(kPi / 2.0, 0.0, 0.0);
  const std::vector<double> grid = make_phase_grid(8);

  SUBCASE("real coherence is excluded with the frozen sine amplitude") {
    const TargetModel model = build_double_well(1.0, Vec3(1, 0, 0), 0.5, Complex(0.4, 0.0));
    const Verdict verdict = discriminate(phase_scan(model, p, 0.0, kPi / 2.0, grid));
    CHECK(verdict.classical_excluded);
    CHECK(std::abs(verdict.a_sin) == doctest::Approx(1.6).epsilon(1e-10));
    CHECK(verdict.a_sin_threshold == doctest::Approx(1e-10));
  }
  SUBCASE("imaginary coherence with time averaging is not excluded") {
    const TargetModel model = build_double_well(1.0, Vec3(1, 0, 0), 0.5, Complex(0.0, 0.4));
    const PhaseScan scan = averaged_phase_scan(model, p, kPi / 2.0, grid);
    CHECK(scan.averaged);
    const Verdict verdict = discriminate(scan);
    CHECK_FALSE(verdict.classical_excluded);
    CHECK(std::abs(verdict.a_sin) < 1e-10);
    CHECK(verdict.max_i_diff_npi < 1e-10);
  }
  SUBCASE("exact classical scan is never excluded") {
    const ClassicalModel model = build_classical_hopper(0.8, Vec3(1, 0, 0), 0.4, 17);
    const Verdict verdict = discriminate(classical_phase_scan(model, p, 0.0, 1.0, grid));
    CHECK_FALSE(verdict.classical_excluded);
  }
  SUBCASE("sampled classical scan is not excluded at five sigma") {
    const ClassicalModel model = build_classical_hopper(0.8, Vec3(1, 0, 0), 0.4, 17);
    const PhaseScan scan = classical_phase_scan_mc(model, p, 0.0, 1.0, grid, 20000);
    const Verdict verdict = discriminate(scan);
    CHECK_FALSE(verdict.classical_excluded);
    CHECK(verdict.a_sin_threshold >= 5.0 * verdict.a_sin_error);
  }
  SUBCASE("grids without the required rows are rejected") {
    const TargetModel model = build_double_well(1.0, Vec3(1, 0, 0), 0.5, 0.0);
    CHECK_THROWS_AS(discriminate(phase_scan(model, p, 0.0, 1.0, {0.0, kPi})),
                    std::invalid_argument);
    // six rows but no phi = pi
    const std::vector<double> shifted{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
    CHECK_THROWS_AS(discriminate(phase_scan(model, p, 0.0, 1.0, shifted)),
                    std::invalid_argument);
  }
}

TEST_CASE("time-averaged scan removes the first-time dependence exactly") {
  // For a two-site target the averaged channels equal the closed forms with
  // the occupations replaced by 1/2; real coherence survives the average.
  const TargetModel model = build_double_well(1.0, Vec3(1, 0, 0), 0.9, Complex(0.2, 0.0));
  const Vec3 p(kPi, 0.0, 0.0);
  const double dt = kPi / 2.0;
  const PhaseScan scan = averaged_phase_scan(model, p, dt, make_phase_grid(8), 64);
  // averaged S(p) at p.d = pi: cos^2 - sin^2 ... with gamma^R terms; compute
  // from the independent average of the exact scattering function.
  Complex s_avg = 0.0, s_avg_minus = 0.0;
  const int n = 256;
  for (int k = 0; k < n; ++k) {
    const double t1 = 2.0 * kPi * k / n;
    s_avg += isf(model, p, t1, t1 + dt).value;
    s_avg_minus += isf(model, -p, t1, t1 + dt).value;
  }
  s_avg /= n;
  s_avg_minus /= n;
  for (std::size_t j = 0; j < scan.rows.size(); ++j) {
    const double phi = scan.rows[j].phi;
    const Complex rot = std::exp(Complex(0, phi));
    const double expected_sum =
        4.0 + 2.0 * std::real(rot * s_avg) + 2.0 * std::real(rot * s_avg_minus);
    CHECK(std::abs(scan.rows[j].i_sum - expected_sum) < 1e-9);
  }
  CHECK_THROWS_AS(averaged_phase_scan(model, p, dt, make_phase_grid(8), 8),
                  std::invalid_argument);  // too few samples
  const TargetModel big = build_chain(4, 1.0, 1.0);
  CHECK_THROWS_AS(averaged_phase_scan(big, p, dt, make_phase_grid(8), 64),
                  std::invalid_argument);  // two-site targets only
}

TEST_CASE("phase grid construction") {
  const std::vector<double> grid = make_phase_grid(8);
  REQUIRE(grid.size() == 8);
  CHECK(grid[0] == 0.0);
  CHECK(grid[4] == kPi);  // exact: division by a power of two
  CHECK_THROWS_AS(make_phase_grid(0), std::invalid_argument);
}

TEST_CASE("resonant-filter beat signal") {
  const Vec3 p(kPi / 2.0, 0.0, 0.0);
  SUBCASE("frozen dynamics reproduce the two-beam fringe under the envelope") {
    const TargetModel frozen = build_double_well(0.0, Vec3(1, 0, 0), 0.7, Complex(0.2, 0.1));
    const double lifetime = 141.0;
    const double omega_d = 2.0 * kPi * 0.05 / lifetime;
    const double phi = 0.4;
    std::vector<double> times;
    for (int j = 0; j < 256; ++j) times.push_back(j * 4.0 * lifetime / 255.0);
    const std::vector<double> signal =
        moessbauer_signal(frozen, p, times, lifetime, omega_d, phi);
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double h = std::exp(-times[j] / lifetime);
      const double expected = h * h * 2.0 * (1.0 + std::cos(omega_d * times[j] + phi));
      CHECK(std::abs(signal[j] - expected) < 1e-10);
    }
  }
  SUBCASE("opposite phase with no shift cancels identically") {
    const TargetModel frozen = build_double_well(0.0, Vec3(1, 0, 0), 0.5, 0.0);
    std::vector<double> times{0.0, 10.0, 50.0, 141.0, 400.0};
    for (double v : moessbauer_signal(frozen, p, times, 141.0, 0.0, kPi)) {
      CHECK(std::abs(v) < 1e-12);
    }
  }
  SUBCASE("input validation") {
    const TargetModel model = build_double_well(1.0, Vec3(1, 0, 0), 0.5, 0.0);
    CHECK_THROWS_AS(moessbauer_signal(model, p, {1.0, 0.5}, 141.0, 0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(moessbauer_signal(model, p, {0.0, 1.0}, -3.0, 0.0, 0.0),
                    std::invalid_argument);
  }
}
