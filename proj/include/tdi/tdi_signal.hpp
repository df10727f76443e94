#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdi/classical.hpp"
#include "tdi/correlations.hpp"
#include "tdi/target_model.hpp"

namespace tdi {

/// Temporal envelope of the probe pulse. Detection probabilities are reported
/// with a unit envelope unless another kind is selected.
struct EnvelopeModel {
  enum class Kind { unit, gaussian, exponential };
  Kind kind = Kind::unit;
  double width = 1.0;     // gaussian: exp(-t^2 / (2 width^2))
  double lifetime = 141.0;  // exponential: step(t) * exp(-t / lifetime)
  void validate() const;
  double operator()(double t) const;
};

/// Two-branch interferometric probe: one scattering channel at t1, a second
/// at t2 >= t1, with controllable relative phase phi between the branches.
struct TDIConfig {
  Vec3 p = Vec3::Zero();   // momentum transfer probed by both branches
  double t1 = 0.0;
  double t2 = 0.0;
  double phi = 0.0;
  EnvelopeModel envelope;  // unit by default
  void validate() const;   // finite entries, t2 >= t1, envelope valid
};

/// Detection probability (arbitrary units) at detection time t for the
/// two-branch amplitude acting on the initial state:
///   P = f(t)^2 [ S(p,t1,t1) + S(p,t2,t2) + 2 Re( e^{i phi} S(p,t1,t2) ) ]
/// computed at amplitude level, branch j carrying the momentum-space density
/// operator at time t_j. Mixed initial states are averaged over their
/// spectral decomposition. Nonnegative up to rounding.
double detection_probability(const TargetModel& model, const TDIConfig& cfg, double t = 0.0);

/// The interference term assembled two ways from S = S(p,t1,t2) (unit
/// envelope): `derived` uses 2cos(phi) Re S - 2sin(phi) Im S, matching
/// detection_probability exactly; `literal` is the single-weight sine variant
/// 2cos(phi) Re S - sin(phi) Im S. Both include the diagonal terms; their
/// difference sin(phi) Im S is returned for the consistency report.
struct ProbabilityFormula {
  double derived = 0.0;
  double literal = 0.0;
  double difference = 0.0;  // literal - derived
};
ProbabilityFormula detection_probability_formula(const TargetModel& model, const TDIConfig& cfg);

/// Sum and difference of the detection intensities at opposite momentum
/// transfers, evaluated with a unit envelope:
///   i_sum  = P(+p) + P(-p),   i_diff = P(+p) - P(-p).
/// For classical statistics i_sum has no sin(phi) component and i_diff is
/// proportional to -sin(phi); quantum targets can violate both.
struct IntensityPair {
  double i_sum = 0.0;
  double i_diff = 0.0;
};
IntensityPair intensity_pm(const TargetModel& model, const TDIConfig& cfg);

/// The classical predictions evaluated from the exact jump-process ISF, in the
/// same amplitude normalization as intensity_pm (twice the single-channel
/// textbook form, so the two functions are directly comparable):
///   i_sum  = 2 [ S(p,t1,t1) + S(p,t2,t2) + 2 cos(phi) Re S ]
///   i_diff = 2 [ -2 sin(phi) Im S ]
IntensityPair classical_intensity_pm(const ClassicalModel& model, const TDIConfig& cfg);

/// One row of a phase scan; std errors are zero for exact evaluations.
struct PhaseScanRow {
  double phi = 0.0;
  double i_sum = 0.0;
  double i_diff = 0.0;
  double std_error_sum = 0.0;
  double std_error_diff = 0.0;
};

struct PhaseScan {
  std::vector<PhaseScanRow> rows;
  Vec3 p = Vec3::Zero();
  double t1 = 0.0;
  double t2 = 0.0;
  std::string model_id;
  bool statistical = false;  // true when rows carry Monte Carlo noise
  bool averaged = false;     // true when t1 was averaged over a period
};

/// phi grid: n equally spaced points covering [0, 2 pi), starting at 0.
std::vector<double> make_phase_grid(int n);

/// Exact quantum phase scan of (i_sum, i_diff) over the given strictly
/// increasing, nonempty phi grid.
PhaseScan phase_scan(const TargetModel& model, const Vec3& p, double t1, double t2,
                     const std::vector<double>& phi_grid);

/// Same scan with the first scattering time averaged uniformly over one
/// oscillation period of the two-site target (n_t1 >= 16 samples), keeping
/// the delay t2 - t1 = dt fixed; models a probe that does not resolve t1.
PhaseScan averaged_phase_scan(const TargetModel& model, const Vec3& p, double dt,
                              const std::vector<double>& phi_grid, int n_t1 = 64);

/// Exact classical scan via the rate-generator ISF; std errors are zero.
PhaseScan classical_phase_scan(const ClassicalModel& model, const Vec3& p, double t1, double t2,
                               const std::vector<double>& phi_grid);

/// Trajectory-sampled classical scan; every (row, sign) cell draws an
/// independent substream of model.seed, so row noise is uncorrelated and
/// fitted-coefficient errors propagate exactly.
PhaseScan classical_phase_scan_mc(const ClassicalModel& model, const Vec3& p, double t1,
                                  double t2, const std::vector<double>& phi_grid,
                                  std::uint64_t n_traj);

/// Linear least-squares fit of y(phi) to  c0 + c_cos cos(phi) + c_sin sin(phi).
/// Coefficient standard errors are propagated exactly from the per-row
/// std_error values (zero errors in -> zero errors out).
struct HarmonicFit {
  double c0 = 0.0;
  double c_cos = 0.0;
  double c_sin = 0.0;
  double err_c0 = 0.0;
  double err_cos = 0.0;
  double err_sin = 0.0;
};
HarmonicFit fit_harmonic(const std::vector<double>& phi, const std::vector<double>& y,
                         const std::vector<double>& std_error = {});

/// Outcome of the classicality test on a phase scan. Classical statistics
/// forces (a) the sum channel to contain no sin(phi) component and (b) the
/// difference channel to vanish at phi = 0 and pi; a resolved violation of
/// either excludes every classical jump model for the target.
struct Verdict {
  bool classical_excluded = false;
  double a_sin = 0.0;             // fitted sin(phi) amplitude of the sum channel
  double a_sin_error = 0.0;
  double a_sin_threshold = 0.0;
  double max_i_diff_npi = 0.0;    // max |i_diff| over rows at phi = 0 or pi
  double i_diff_error = 0.0;      // std error accompanying that row
  double i_diff_threshold = 0.0;
  std::string detail;
};

/// Fit the scan and decide. Requires rows at phi = 0 and phi = pi and at
/// least six rows in total. Exact scans use tol.algebraic_tol as threshold;
/// statistical scans use tol.statistical_sigma times the propagated standard
/// error, floored at tol.algebraic_tol.
Verdict discriminate(const PhaseScan& scan, const Tolerances& tol = {});

/// Resonant-filter beat signal: an undelayed branch against a branch both
/// delayed (dynamics at time t) and frequency-shifted by omega_doppler,
/// under the causal exponential envelope h(x) = step(x) exp(-x / lifetime):
///   I(t) = h(t)^2 * sum_k w_k || D_p(0) v_k + e^{i(omega_doppler t + phi)} D_p(t) v_k ||^2
/// summed over the spectral decomposition (w_k, v_k) of the initial state,
/// where D_p(t) is the momentum-space density operator of the target.
std::vector<double> moessbauer_signal(const TargetModel& model, const Vec3& p,
                                      const std::vector<double>& times, double lifetime,
                                      double omega_doppler, double phi);

}  // namespace tdi
