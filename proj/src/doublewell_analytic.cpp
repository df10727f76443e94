#include "tdi/doublewell_analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "tdi/correlations.hpp"

namespace tdi {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kAverageSamples = 64;

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

Vec3 separation_vector(const DoubleWellState& state, Separation r) {
  switch (r) {
    case Separation::minus_d:
      return -state.d;
    case Separation::zero:
      return Vec3::Zero();
    case Separation::plus_d:
      return state.d;
  }
  fail("unknown separation");
}

/// Uniform average of f(t1) over one oscillation period. The integrand is a
/// trigonometric polynomial of degree one in t1, so any >= 3-point uniform
/// grid integrates it exactly; 64 points leave plenty of margin.
template <typename F>
Complex period_average(const DoubleWellState& state, F&& f) {
  if (state.omega == 0.0) return f(0.0);  // frozen dynamics: nothing to average
  const double period = 2.0 * kPi / std::abs(state.omega);
  Complex acc = 0.0;
  for (int k = 0; k < kAverageSamples; ++k) {
    acc += f(period * k / kAverageSamples);
  }
  return acc / static_cast<double>(kAverageSamples);
}

AnalyticComparison finish(Complex literal, Complex literal_squared, Complex oracle) {
  AnalyticComparison cmp;
  cmp.literal = literal;
  cmp.literal_squared = literal_squared;
  cmp.oracle = oracle;
  cmp.abs_diff = std::abs(literal - oracle);
  return cmp;
}

}  // namespace

void DoubleWellState::validate(double tol) const {
  if (!std::isfinite(omega)) fail("two-site state: omega must be finite");
  if (!d.allFinite() || d.cwiseAbs().maxCoeff() < kPositionTol) {
    fail("two-site state: separation must be nonzero");
  }
  if (!(p_left >= 0.0 && p_left <= 1.0)) fail("two-site state: p_left outside [0, 1]");
  const double bound = p_left * (1.0 - p_left);
  if (!(std::norm(gamma) <= bound + tol)) {
    fail("two-site state: |gamma|^2 exceeds p_left (1 - p_left)");
  }
}

TargetModel DoubleWellState::to_model() const {
  validate();
  return build_double_well(omega, d, p_left, gamma);
}

TrigFactors TrigFactors::at(double omega, double dt) {
  TrigFactors tf;
  tf.s = std::sin(0.5 * omega * dt);
  tf.c = std::cos(0.5 * omega * dt);
  tf.s_full = std::sin(omega * dt);
  return tf;
}

AnalyticComparison dcf_analytic(const DoubleWellState& state, double dt, Separation r) {
  if (!std::isfinite(dt)) fail("delay must be finite");
  const TargetModel model = state.to_model();
  const TrigFactors tf = TrigFactors::at(state.omega, dt);
  const double s2 = tf.s * tf.s;
  const double c2 = tf.c * tf.c;
  const Complex half_i_sfull(0.0, 0.5 * tf.s_full);

  Complex literal, literal_squared;
  switch (r) {
    case Separation::plus_d:
      literal = s2 * state.p_left + half_i_sfull * std::conj(state.gamma);
      literal_squared = literal;  // already carries the squared factor
      break;
    case Separation::minus_d:
      literal = s2 * (1.0 - state.p_left) + half_i_sfull * state.gamma;
      literal_squared = literal;
      break;
    case Separation::zero:
      literal = Complex(tf.c, -tf.s_full * state.gamma.real());
      literal_squared = Complex(c2, -tf.s_full * state.gamma.real());
      break;
  }
  const Complex oracle = dcf(model, separation_vector(state, r), 0.0, dt);
  return finish(literal, literal_squared, oracle);
}

AnalyticComparison isf_analytic(const DoubleWellState& state, double dt, const Vec3& p) {
  if (!std::isfinite(dt)) fail("delay must be finite");
  if (!p.allFinite()) fail("momentum must be finite");
  const TargetModel model = state.to_model();
  const TrigFactors tf = TrigFactors::at(state.omega, dt);
  const double s2 = tf.s * tf.s;
  const double c2 = tf.c * tf.c;
  const double pd = p.dot(state.d);
  const double p_right = 1.0 - state.p_left;

  const double real_part = s2 * std::cos(pd) + c2;
  const double imag_part = (state.p_left - p_right) * s2 * std::sin(pd) +
                           0.5 * tf.s_full *
                               (state.gamma.imag() * std::sin(pd) +
                                state.gamma.real() * (std::cos(pd) - 2.0));
  const Complex literal(real_part, imag_part);
  const Complex oracle = isf(model, p, 0.0, dt).value;
  return finish(literal, literal, oracle);
}

AnalyticComparison averaged_isf(const DoubleWellState& state, double dt, const Vec3& p) {
  if (!std::isfinite(dt)) fail("delay must be finite");
  if (!p.allFinite()) fail("momentum must be finite");
  const TargetModel model = state.to_model();
  const TrigFactors tf = TrigFactors::at(state.omega, dt);
  const double s2 = tf.s * tf.s;
  const double c2 = tf.c * tf.c;
  const double pd = p.dot(state.d);

  const Complex literal =
      Complex(s2 * std::cos(pd) + c2, 0.0) +
      Complex(0.0, 0.5) * (std::cos(pd) - 2.0) * tf.s_full * state.gamma.real();
  const Complex oracle = period_average(
      state, [&](double t1) { return isf(model, p, t1, t1 + dt).value; });
  return finish(literal, literal, oracle);
}

AnalyticComparison averaged_dcf(const DoubleWellState& state, double dt, Separation r) {
  if (!std::isfinite(dt)) fail("delay must be finite");
  const TargetModel model = state.to_model();
  const TrigFactors tf = TrigFactors::at(state.omega, dt);
  const Complex i_sfull_gr(0.0, tf.s_full * state.gamma.real());

  Complex literal, literal_squared;
  if (r == Separation::zero) {
    literal = Complex(tf.c, 0.0) - i_sfull_gr;
    literal_squared = Complex(tf.c * tf.c, 0.0) - i_sfull_gr;
  } else {
    literal = 0.5 * tf.s + 0.5 * i_sfull_gr;
    literal_squared = 0.5 * tf.s * tf.s + 0.5 * i_sfull_gr;
  }
  const Vec3 rv = separation_vector(state, r);
  const Complex oracle =
      period_average(state, [&](double t1) { return dcf(model, rv, t1, t1 + dt); });
  return finish(literal, literal_squared, oracle);
}

double gamma_r_invariant(const DoubleWellState& state, const std::vector<double>& t_grid) {
  const TargetModel model = state.to_model();
  const double reference = state.gamma.real();
  double worst = 0.0;
  for (double t : t_grid) {
    if (!std::isfinite(t)) fail("time grid entries must be finite");
    const Operator mu_t = state_at(model, t);
    worst = std::max(worst, std::abs(mu_t(0, 1).real() - reference));
  }
  return worst;
}

}  // namespace tdi
