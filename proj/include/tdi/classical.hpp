#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdi/operator_algebra.hpp"

namespace tdi {

/// Classical comparator: a single particle hopping between discrete sites as a
/// continuous-time Markov jump process. rates[n][m] is the jump rate n -> m
/// (nonnegative, zero diagonal); the particle starts distributed per initial.
struct ClassicalModel {
  std::vector<Vec3> positions;
  std::vector<std::vector<double>> rates;
  std::vector<double> initial;
  std::uint64_t seed = 1;
  std::string id;

  std::size_t n_sites() const { return positions.size(); }
  void validate(double tol = 1e-10) const;
};

/// Two-site symmetric hopper: sites at -d/2 and +d/2, rate k both ways,
/// initial occupation p_left on the left site.
ClassicalModel build_classical_hopper(double rate, const Vec3& d, double p_left,
                                      std::uint64_t seed = 1);

/// Monte Carlo estimate of a complex mean with per-component standard errors.
struct MCEstimate {
  Complex mean;
  double std_error_re = 0.0;
  double std_error_im = 0.0;
  std::uint64_t n_traj = 0;
  /// Combined scalar standard error (conservative bound for either component).
  double std_error() const;
};

/// Deterministic substream seed: mixes (seed, index, salt) so batches drawn in
/// any order reproduce bit-identically from one top-level seed.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt);

/// Trajectory estimate of the classical intermediate scattering function
///   S_cl(p, t1, t2) = E[ e^{i p . (x(t2) - x(t1))} ]
/// from n_traj paths drawn sequentially from one stream derived from
/// model.seed. Deterministic for a fixed model.seed.
MCEstimate classical_isf(const ClassicalModel& model, const Vec3& p, double t1, double t2,
                         std::uint64_t n_traj);

/// Same estimator with an explicit stream salt, used to draw statistically
/// independent batches of the same quantity (e.g. the +p and -p channels of a
/// symmetry test, or distinct rows of a phase scan).
MCEstimate classical_isf_salted(const ClassicalModel& model, const Vec3& p, double t1,
                                double t2, std::uint64_t n_traj, std::uint64_t salt);

/// Exact S_cl(p, t1, t2) via the matrix exponential of the rate generator,
/// starting from `initial` at time 0. Used as the oracle for the estimator.
Complex classical_isf_exact(const ClassicalModel& model, const Vec3& p, double t1, double t2);

/// Site occupied at each requested time along one sampled path.
/// times must be nondecreasing and nonnegative.
std::vector<std::size_t> sample_path(const ClassicalModel& model, const std::vector<double>& times,
                                     std::uint64_t stream_seed);

/// n_traj (site at t1, site at t2) samples, drawn sequentially from one
/// stream seeded with substream_seed(model.seed, 0, salt) and stored in draw
/// order. The building block of every Monte Carlo estimator here.
std::vector<std::pair<std::size_t, std::size_t>> sample_site_pairs(const ClassicalModel& model,
                                                                   double t1, double t2,
                                                                   std::uint64_t n_traj,
                                                                   std::uint64_t salt);

}  // namespace tdi
