#include "tdi/tdi_signal.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tdi {

namespace {

constexpr double kPi = 3.14159265358979323846;
/// Base of the per-(row, sign) substream salts used by Monte Carlo phase scans.
constexpr std::uint64_t kScanSaltBase = 0x7364695F73636E31ULL;

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

void require_phase_grid(const std::vector<double>& grid) {
  if (grid.empty()) fail("phase grid must not be empty");
  double prev = -std::numeric_limits<double>::infinity();
  for (double phi : grid) {
    if (!std::isfinite(phi)) fail("phase grid entries must be finite");
    if (!(phi > prev)) fail("phase grid must be strictly increasing");
    prev = phi;
  }
}

struct SpectralState {
  std::vector<double> weights;
  std::vector<StateVector> vectors;
};

SpectralState decompose_initial(const Operator& mu) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(mu);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("initial-state eigendecomposition failed");
  }
  SpectralState out;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const double w = solver.eigenvalues()[k];
    if (w <= 0.0) continue;  // weightless (or rounding-negative) component
    out.weights.push_back(w);
    out.vectors.push_back(solver.eigenvectors().col(k));
  }
  return out;
}

/// The three ISF inputs of one interference channel.
struct ChannelISF {
  double s11 = 0.0;
  double s22 = 0.0;
  Complex s12;
};

ChannelISF channel_isf(const TargetModel& model, const Vec3& p, double t1, double t2) {
  ChannelISF ch;
  ch.s11 = isf(model, p, t1, t1).value.real();
  ch.s22 = isf(model, p, t2, t2).value.real();
  ch.s12 = isf(model, p, t1, t2).value;
  return ch;
}

double channel_intensity(const ChannelISF& ch, double phi) {
  return ch.s11 + ch.s22 + 2.0 * (std::exp(Complex(0.0, phi)) * ch.s12).real();
}

PhaseScan scan_from_channels(const ChannelISF& plus, const ChannelISF& minus,
                             const std::vector<double>& phi_grid) {
  PhaseScan scan;
  scan.rows.reserve(phi_grid.size());
  for (double phi : phi_grid) {
    const double p_plus = channel_intensity(plus, phi);
    const double p_minus = channel_intensity(minus, phi);
    scan.rows.push_back({phi, p_plus + p_minus, p_plus - p_minus, 0.0, 0.0});
  }
  return scan;
}

struct MeanVar {
  double mean = 0.0;
  double std_error = 0.0;
};

}  // namespace

void EnvelopeModel::validate() const {
  switch (kind) {
    case Kind::unit:
      return;
    case Kind::gaussian:
      if (!(width > 0.0) || !std::isfinite(width)) fail("envelope width must be positive");
      return;
    case Kind::exponential:
      if (!(lifetime > 0.0) || !std::isfinite(lifetime)) {
        fail("envelope lifetime must be positive");
      }
      return;
  }
  fail("unknown envelope kind");
}

double EnvelopeModel::operator()(double t) const {
  switch (kind) {
    case Kind::unit:
      return 1.0;
    case Kind::gaussian:
      return std::exp(-t * t / (2.0 * width * width));
    case Kind::exponential:
      return t < 0.0 ? 0.0 : std::exp(-t / lifetime);
  }
  fail("unknown envelope kind");
}

void TDIConfig::validate() const {
  if (!p.allFinite()) fail("momentum transfer must be finite");
  if (!std::isfinite(t1) || !std::isfinite(t2)) fail("scattering times must be finite");
  if (!(t2 >= t1)) fail("the delayed channel requires t2 >= t1");
  if (!std::isfinite(phi)) fail("phase must be finite");
  envelope.validate();
}

double detection_probability(const TargetModel& model, const TDIConfig& cfg, double t) {
  model.validate();
  cfg.validate();
  const Operator d1 = density_fourier(model, cfg.p, cfg.t1);
  const Operator d2 = density_fourier(model, cfg.p, cfg.t2);
  const SpectralState spectral = decompose_initial(model.initial);
  const Complex branch_phase = std::exp(Complex(0.0, cfg.phi));
  double acc = 0.0;
  for (std::size_t k = 0; k < spectral.weights.size(); ++k) {
    const StateVector& v = spectral.vectors[k];
    acc += spectral.weights[k] * (d1 * v + branch_phase * (d2 * v)).squaredNorm();
  }
  const double f = cfg.envelope(t);
  return f * f * acc;
}

ProbabilityFormula detection_probability_formula(const TargetModel& model, const TDIConfig& cfg) {
  cfg.validate();
  const ChannelISF ch = channel_isf(model, cfg.p, cfg.t1, cfg.t2);
  const double c = std::cos(cfg.phi);
  const double s = std::sin(cfg.phi);
  ProbabilityFormula out;
  out.derived = ch.s11 + ch.s22 + 2.0 * c * ch.s12.real() - 2.0 * s * ch.s12.imag();
  out.literal = ch.s11 + ch.s22 + 2.0 * c * ch.s12.real() - s * ch.s12.imag();
  out.difference = out.literal - out.derived;
  return out;
}

IntensityPair intensity_pm(const TargetModel& model, const TDIConfig& cfg) {
  TDIConfig plain = cfg;
  plain.envelope = EnvelopeModel{};
  TDIConfig mirrored = plain;
  mirrored.p = -cfg.p;
  const double p_plus = detection_probability(model, plain);
  const double p_minus = detection_probability(model, mirrored);
  return {p_plus + p_minus, p_plus - p_minus};
}

IntensityPair classical_intensity_pm(const ClassicalModel& model, const TDIConfig& cfg) {
  cfg.validate();
  const double s11 = classical_isf_exact(model, cfg.p, cfg.t1, cfg.t1).real();
  const double s22 = classical_isf_exact(model, cfg.p, cfg.t2, cfg.t2).real();
  const Complex s12 = classical_isf_exact(model, cfg.p, cfg.t1, cfg.t2);
  IntensityPair out;
  out.i_sum = 2.0 * (s11 + s22 + 2.0 * std::cos(cfg.phi) * s12.real());
  out.i_diff = 2.0 * (-2.0 * std::sin(cfg.phi) * s12.imag());
  return out;
}

std::vector<double> make_phase_grid(int n) {
  if (n < 1) fail("phase grid needs at least one point");
  std::vector<double> grid;
  grid.reserve(n);
  for (int j = 0; j < n; ++j) grid.push_back(2.0 * kPi * j / n);
  return grid;
}

PhaseScan phase_scan(const TargetModel& model, const Vec3& p, double t1, double t2,
                     const std::vector<double>& phi_grid) {
  require_phase_grid(phi_grid);
  model.validate();
  const ChannelISF plus = channel_isf(model, p, t1, t2);
  const ChannelISF minus = channel_isf(model, (-p).eval(), t1, t2);
  PhaseScan scan = scan_from_channels(plus, minus, phi_grid);
  scan.p = p;
  scan.t1 = t1;
  scan.t2 = t2;
  scan.model_id = model.id;
  return scan;
}

PhaseScan averaged_phase_scan(const TargetModel& model, const Vec3& p, double dt,
                              const std::vector<double>& phi_grid, int n_t1) {
  require_phase_grid(phi_grid);
  model.validate();
  if (model.dim() != 2) fail("t1 averaging is defined for two-site targets only");
  if (n_t1 < 16) fail("t1 averaging needs at least 16 samples");
  if (!std::isfinite(dt)) fail("delay must be finite");

  Eigen::SelfAdjointEigenSolver<Operator> solver(model.hamiltonian);
  const double gap =
      solver.eigenvalues().maxCoeff() - solver.eigenvalues().minCoeff();
  if (!(gap > 1e-12)) fail("t1 averaging requires a nonzero tunneling splitting");
  const double period = 2.0 * kPi / gap;

  ChannelISF plus, minus;
  for (int k = 0; k < n_t1; ++k) {
    const double t1 = period * k / n_t1;
    const ChannelISF cp = channel_isf(model, p, t1, t1 + dt);
    const ChannelISF cm = channel_isf(model, (-p).eval(), t1, t1 + dt);
    plus.s11 += cp.s11;
    plus.s22 += cp.s22;
    plus.s12 += cp.s12;
    minus.s11 += cm.s11;
    minus.s22 += cm.s22;
    minus.s12 += cm.s12;
  }
  const double inv = 1.0 / n_t1;
  plus.s11 *= inv;
  plus.s22 *= inv;
  plus.s12 *= inv;
  minus.s11 *= inv;
  minus.s22 *= inv;
  minus.s12 *= inv;

  PhaseScan scan = scan_from_channels(plus, minus, phi_grid);
  scan.p = p;
  scan.t1 = 0.0;
  scan.t2 = dt;
  scan.model_id = model.id;
  scan.averaged = true;
  return scan;
}

PhaseScan classical_phase_scan(const ClassicalModel& model, const Vec3& p, double t1, double t2,
                               const std::vector<double>& phi_grid) {
  require_phase_grid(phi_grid);
  ChannelISF plus, minus;
  plus.s11 = classical_isf_exact(model, p, t1, t1).real();
  plus.s22 = classical_isf_exact(model, p, t2, t2).real();
  plus.s12 = classical_isf_exact(model, p, t1, t2);
  const Vec3 mp = -p;
  minus.s11 = classical_isf_exact(model, mp, t1, t1).real();
  minus.s22 = classical_isf_exact(model, mp, t2, t2).real();
  minus.s12 = classical_isf_exact(model, mp, t1, t2);
  PhaseScan scan = scan_from_channels(plus, minus, phi_grid);
  scan.p = p;
  scan.t1 = t1;
  scan.t2 = t2;
  scan.model_id = model.id;
  return scan;
}

PhaseScan classical_phase_scan_mc(const ClassicalModel& model, const Vec3& p, double t1,
                                  double t2, const std::vector<double>& phi_grid,
                                  std::uint64_t n_traj) {
  require_phase_grid(phi_grid);
  if (n_traj < 2) fail("Monte Carlo scan needs at least two trajectories");
  model.validate();

  // Per-(row, sign) estimate of the single-channel intensity
  //   mean_k [ 2 + 2 Re( e^{i phi} e^{i p . (x_k(t2) - x_k(t1))} ) ]
  // on an independent substream, so rows carry uncorrelated noise.
  const auto estimate = [&](const Vec3& pp, double phi, std::uint64_t salt) {
    const auto pairs = sample_site_pairs(model, t1, t2, n_traj, salt);
    const Complex rot = std::exp(Complex(0.0, phi));
    double sum = 0.0, sumsq = 0.0;
    for (const auto& [from, to] : pairs) {
      const Complex s =
          std::exp(Complex(0.0, pp.dot(model.positions[to] - model.positions[from])));
      const double y = 2.0 + 2.0 * (rot * s).real();
      sum += y;
      sumsq += y * y;
    }
    const double n = static_cast<double>(n_traj);
    MeanVar mv;
    mv.mean = sum / n;
    const double var = std::max(0.0, (sumsq - n * mv.mean * mv.mean) / (n - 1.0));
    mv.std_error = std::sqrt(var / n);
    return mv;
  };

  PhaseScan scan;
  scan.rows.reserve(phi_grid.size());
  const Vec3 mp = -p;
  for (std::size_t j = 0; j < phi_grid.size(); ++j) {
    const double phi = phi_grid[j];
    const MeanVar plus = estimate(p, phi, kScanSaltBase + 2 * j);
    const MeanVar minus = estimate(mp, phi, kScanSaltBase + 2 * j + 1);
    const double err = std::hypot(plus.std_error, minus.std_error);
    scan.rows.push_back({phi, plus.mean + minus.mean, plus.mean - minus.mean, err, err});
  }
  scan.p = p;
  scan.t1 = t1;
  scan.t2 = t2;
  scan.model_id = model.id;
  scan.statistical = true;
  return scan;
}

HarmonicFit fit_harmonic(const std::vector<double>& phi, const std::vector<double>& y,
                         const std::vector<double>& std_error) {
  const std::size_t n = phi.size();
  if (n < 3) fail("harmonic fit needs at least 3 samples");
  if (y.size() != n) fail("harmonic fit: phi and y lengths differ");
  if (!std_error.empty() && std_error.size() != n) {
    fail("harmonic fit: std_error length differs from the samples");
  }

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(phi[j]) || !std::isfinite(y[j])) fail("harmonic fit: non-finite sample");
    design(j, 0) = 1.0;
    design(j, 1) = std::cos(phi[j]);
    design(j, 2) = std::sin(phi[j]);
    rhs[j] = y[j];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) fail("phase grid cannot resolve the harmonic coefficients");
  const Eigen::Vector3d coeff = qr.solve(rhs);

  HarmonicFit fit;
  fit.c0 = coeff[0];
  fit.c_cos = coeff[1];
  fit.c_sin = coeff[2];

  bool any_noise = false;
  for (double s : std_error) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail("harmonic fit: invalid std_error");
    if (s > 0.0) any_noise = true;
  }
  if (any_noise) {
    // Exact propagation through the unweighted estimator c = M y with
    // M = (X^T X)^{-1} X^T: var(c_i) = sum_j M_ij^2 sigma_j^2.
    const Eigen::MatrixXd pinv =
        qr.solve(Eigen::MatrixXd::Identity(n, n));  // 3 x n least-squares inverse
    Eigen::Vector3d var = Eigen::Vector3d::Zero();
    for (std::size_t j = 0; j < n; ++j) {
      const double s2 = std_error[j] * std_error[j];
      for (int i = 0; i < 3; ++i) var[i] += pinv(i, j) * pinv(i, j) * s2;
    }
    fit.err_c0 = std::sqrt(var[0]);
    fit.err_cos = std::sqrt(var[1]);
    fit.err_sin = std::sqrt(var[2]);
  }
  return fit;
}

Verdict discriminate(const PhaseScan& scan, const Tolerances& tol) {
  tol.validate();
  if (scan.rows.size() < 6) {
    fail("discriminator needs at least 6 phase points including 0 and pi");
  }
  const auto at_multiple_of_pi = [](double phi) {
    return std::abs(phi) < 1e-9 || std::abs(phi - kPi) < 1e-9;
  };
  bool has_zero = false, has_pi = false;
  for (const PhaseScanRow& row : scan.rows) {
    if (std::abs(row.phi) < 1e-9) has_zero = true;
    if (std::abs(row.phi - kPi) < 1e-9) has_pi = true;
  }
  if (!has_zero || !has_pi) {
    fail("discriminator needs at least 6 phase points including 0 and pi");
  }

  std::vector<double> phis, sums, errs;
  phis.reserve(scan.rows.size());
  sums.reserve(scan.rows.size());
  errs.reserve(scan.rows.size());
  for (const PhaseScanRow& row : scan.rows) {
    phis.push_back(row.phi);
    sums.push_back(row.i_sum);
    errs.push_back(row.std_error_sum);
  }
  const HarmonicFit fit =
      fit_harmonic(phis, sums, scan.statistical ? errs : std::vector<double>{});

  Verdict verdict;
  verdict.a_sin = fit.c_sin;
  verdict.a_sin_error = fit.err_sin;
  verdict.a_sin_threshold =
      scan.statistical ? std::max(tol.algebraic_tol, tol.statistical_sigma * fit.err_sin)
                       : tol.algebraic_tol;
  const bool sum_violated = std::abs(verdict.a_sin) > verdict.a_sin_threshold;

  bool diff_violated = false;
  for (const PhaseScanRow& row : scan.rows) {
    if (!at_multiple_of_pi(row.phi)) continue;
    const double threshold =
        scan.statistical
            ? std::max(tol.algebraic_tol, tol.statistical_sigma * row.std_error_diff)
            : tol.algebraic_tol;
    const double magnitude = std::abs(row.i_diff);
    if (magnitude > verdict.max_i_diff_npi || verdict.i_diff_threshold == 0.0) {
      verdict.max_i_diff_npi = magnitude;
      verdict.i_diff_error = row.std_error_diff;
      verdict.i_diff_threshold = threshold;
    }
    if (magnitude > threshold) diff_violated = true;
  }

  verdict.classical_excluded = sum_violated || diff_violated;

  std::ostringstream detail;
  detail << std::scientific << std::setprecision(3);
  detail << "sum-channel sin amplitude " << std::abs(verdict.a_sin)
         << (sum_violated ? " exceeds" : " within") << " threshold " << verdict.a_sin_threshold
         << "; difference channel at phase multiples of pi max " << verdict.max_i_diff_npi
         << (diff_violated ? " exceeds" : " within") << " threshold "
         << verdict.i_diff_threshold;
  verdict.detail = detail.str();
  return verdict;
}

std::vector<double> moessbauer_signal(const TargetModel& model, const Vec3& p,
                                      const std::vector<double>& times, double lifetime,
                                      double omega_doppler, double phi) {
  model.validate();
  if (!p.allFinite()) fail("momentum transfer must be finite");
  if (!(lifetime > 0.0) || !std::isfinite(lifetime)) fail("lifetime must be positive");
  if (!std::isfinite(omega_doppler) || !std::isfinite(phi)) {
    fail("Doppler frequency and phase must be finite");
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0 || !(t > prev)) {
      fail("time grid must be strictly increasing and nonnegative");
    }
    prev = t;
  }

  const SpectralState spectral = decompose_initial(model.initial);
  const Operator d0 = density_fourier(model, p, 0.0);
  std::vector<StateVector> reference;
  reference.reserve(spectral.vectors.size());
  for (const StateVector& v : spectral.vectors) reference.push_back(d0 * v);

  std::vector<double> intensity;
  intensity.reserve(times.size());
  for (double t : times) {
    const Operator dt = density_fourier(model, p, t);
    const Complex rot = std::exp(Complex(0.0, omega_doppler * t + phi));
    double acc = 0.0;
    for (std::size_t k = 0; k < spectral.weights.size(); ++k) {
      acc += spectral.weights[k] *
             (reference[k] + rot * (dt * spectral.vectors[k])).squaredNorm();
    }
    const double h = std::exp(-t / lifetime);
    intensity.push_back(h * h * acc);
  }
  return intensity;
}

}  // namespace tdi
