#include "tdi/classical.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <unsupported/Eigen/MatrixFunctions>

namespace tdi {

namespace {

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

/// splitmix64 finalizer: a bijective 64-bit mixer with full avalanche.
std::uint64_t mix64(std::uint64_t v) {
  v ^= v >> 30;
  v *= 0xBF58476D1CE4E5B9ULL;
  v ^= v >> 27;
  v *= 0x94D049BB133111EBULL;
  v ^= v >> 31;
  return v;
}

/// Uniform double in [0, 1) from the top 53 bits of one generator word.
double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Exponential waiting time with the given total rate.
double waiting_time(std::mt19937_64& gen, double rate) {
  return -std::log1p(-uniform01(gen)) / rate;
}

std::size_t draw_from_cumulative(const std::vector<double>& weights, double total,
                                 std::mt19937_64& gen) {
  const double u = uniform01(gen) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  bool seen_positive = false;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0.0) {
      last_positive = k;
      seen_positive = true;
      acc += weights[k];
      if (u < acc) return k;
    }
  }
  if (!seen_positive) fail("classical sampler: no admissible outcome");
  return last_positive;  // u landed on the rounding remainder of the cumulative sum
}

/// One trajectory queried at two ordered times; the jump clock carries over
/// between queries so the path is a single consistent realization.
struct PathSampler {
  const ClassicalModel& model;
  std::vector<double> exit_rates;

  explicit PathSampler(const ClassicalModel& m) : model(m) {
    exit_rates.reserve(m.n_sites());
    for (const auto& row : m.rates) {
      double total = 0.0;
      for (double r : row) total += r;
      exit_rates.push_back(total);
    }
  }

  std::size_t draw_initial(std::mt19937_64& gen) const {
    double total = 0.0;
    for (double w : model.initial) total += w;
    return draw_from_cumulative(model.initial, total, gen);
  }

  template <typename OnQuery>
  void run(std::mt19937_64& gen, const std::vector<double>& times, OnQuery&& on_query) const {
    std::size_t site = draw_initial(gen);
    double now = 0.0;
    double next_jump = exit_rates[site] > 0.0
                           ? now + waiting_time(gen, exit_rates[site])
                           : std::numeric_limits<double>::infinity();
    for (double t : times) {
      while (next_jump <= t) {
        now = next_jump;
        site = draw_from_cumulative(model.rates[site], exit_rates[site], gen);
        next_jump = exit_rates[site] > 0.0
                        ? now + waiting_time(gen, exit_rates[site])
                        : std::numeric_limits<double>::infinity();
      }
      on_query(site);
    }
  }
};

void require_query_times(const std::vector<double>& times) {
  double prev = 0.0;
  for (double t : times) {
    if (!std::isfinite(t) || t < prev) {
      fail("classical sampler: query times must be finite, nonnegative and nondecreasing");
    }
    prev = t;
  }
}

}  // namespace

void ClassicalModel::validate(double tol) const {
  if (positions.empty()) fail("classical model: no sites");
  const std::size_t n = positions.size();
  if (rates.size() != n || initial.size() != n) {
    fail("classical model: positions, rates and initial distribution disagree in size");
  }
  for (const Vec3& r : positions) {
    if (!r.allFinite()) fail("classical model: non-finite site position");
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if ((positions[a] - positions[b]).cwiseAbs().maxCoeff() < 1e-9) {
        fail("classical model: coincident site positions");
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (rates[a].size() != n) fail("classical model: rate matrix is not square");
    for (std::size_t b = 0; b < n; ++b) {
      const double r = rates[a][b];
      if (!std::isfinite(r)) fail("classical model: non-finite jump rate");
      if (a == b && r != 0.0) fail("classical model: rate matrix diagonal must be zero");
      if (r < 0.0) {
        std::ostringstream msg;
        msg << "classical model: negative jump rate " << r << " at (" << a << ", " << b << ")";
        fail(msg.str());
      }
    }
  }
  double total = 0.0;
  for (double w : initial) {
    if (!std::isfinite(w) || w < -tol) fail("classical model: invalid initial probability");
    total += w;
  }
  if (!(std::abs(total - 1.0) < std::max(tol, 1e-9))) {
    std::ostringstream msg;
    msg << "classical model: initial distribution sums to " << total;
    fail(msg.str());
  }
}

ClassicalModel build_classical_hopper(double rate, const Vec3& d, double p_left,
                                      std::uint64_t seed) {
  if (!std::isfinite(rate) || rate < 0.0) fail("build_classical_hopper: rate must be >= 0");
  if (!d.allFinite() || d.cwiseAbs().maxCoeff() < 1e-9) {
    fail("build_classical_hopper: separation must be nonzero");
  }
  if (!(p_left >= 0.0 && p_left <= 1.0)) fail("build_classical_hopper: p_left outside [0, 1]");
  ClassicalModel model;
  model.positions = {-0.5 * d, 0.5 * d};
  model.rates = {{0.0, rate}, {rate, 0.0}};
  model.initial = {p_left, 1.0 - p_left};
  model.seed = seed;
  model.id = "classical-ctmc";
  model.validate();
  return model;
}

double MCEstimate::std_error() const { return std::hypot(std_error_re, std_error_im); }

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
  h = mix64(h ^ (index + 0x9E3779B97F4A7C15ULL));
  h = mix64(h ^ (salt + 0x9E3779B97F4A7C15ULL));
  return h;
}

std::vector<std::size_t> sample_path(const ClassicalModel& model, const std::vector<double>& times,
                                     std::uint64_t stream_seed) {
  model.validate();
  require_query_times(times);
  PathSampler sampler(model);
  std::mt19937_64 gen(stream_seed);
  std::vector<std::size_t> sites;
  sites.reserve(times.size());
  sampler.run(gen, times, [&sites](std::size_t s) { sites.push_back(s); });
  return sites;
}

std::vector<std::pair<std::size_t, std::size_t>> sample_site_pairs(const ClassicalModel& model,
                                                                   double t1, double t2,
                                                                   std::uint64_t n_traj,
                                                                   std::uint64_t salt) {
  model.validate();
  if (n_traj < 1) fail("classical sampler: need at least one trajectory");
  const std::vector<double> times = {t1, t2};
  require_query_times(times);
  PathSampler sampler(model);
  std::vector<std::pair<std::size_t, std::size_t>> pairs(n_traj);
  // One generator drives the whole batch: trajectories are drawn sequentially
  // in index order from a stream opened at substream_seed(model.seed, 0, salt).
  // Distinct salts still give statistically independent batches, and a fixed
  // (seed, salt) reproduces bit-identically, without paying generator
  // construction per trajectory.
  std::mt19937_64 gen(substream_seed(model.seed, 0, salt));
  for (std::uint64_t k = 0; k < n_traj; ++k) {
    std::size_t slot = 0;
    sampler.run(gen, times, [&pairs, &slot, k](std::size_t s) {
      if (slot == 0) {
        pairs[k].first = s;
      } else {
        pairs[k].second = s;
      }
      ++slot;
    });
  }
  return pairs;
}

MCEstimate classical_isf_salted(const ClassicalModel& model, const Vec3& p, double t1, double t2,
                                std::uint64_t n_traj, std::uint64_t salt) {
  if (!p.allFinite()) fail("classical isf: momentum must be finite");
  const auto pairs = sample_site_pairs(model, t1, t2, n_traj, salt);

  double sum_re = 0.0, sum_im = 0.0, sumsq_re = 0.0, sumsq_im = 0.0;
  for (const auto& [from, to] : pairs) {
    const Complex s = std::exp(Complex(0.0, p.dot(model.positions[to] - model.positions[from])));
    sum_re += s.real();
    sum_im += s.imag();
    sumsq_re += s.real() * s.real();
    sumsq_im += s.imag() * s.imag();
  }
  const double n = static_cast<double>(n_traj);
  MCEstimate est;
  est.mean = Complex(sum_re / n, sum_im / n);
  est.n_traj = n_traj;
  if (n_traj > 1) {
    const double var_re = std::max(0.0, (sumsq_re - n * est.mean.real() * est.mean.real()) / (n - 1.0));
    const double var_im = std::max(0.0, (sumsq_im - n * est.mean.imag() * est.mean.imag()) / (n - 1.0));
    est.std_error_re = std::sqrt(var_re / n);
    est.std_error_im = std::sqrt(var_im / n);
  }
  return est;
}

MCEstimate classical_isf(const ClassicalModel& model, const Vec3& p, double t1, double t2,
                         std::uint64_t n_traj) {
  return classical_isf_salted(model, p, t1, t2, n_traj, 0);
}

Complex classical_isf_exact(const ClassicalModel& model, const Vec3& p, double t1, double t2) {
  model.validate();
  if (!p.allFinite()) fail("classical isf: momentum must be finite");
  if (!std::isfinite(t1) || !std::isfinite(t2) || t1 < 0.0 || t2 < 0.0) {
    fail("classical isf: times must be finite and nonnegative");
  }
  if (t2 < t1) {
    // E[e^{ip.(x(t2)-x(t1))}] with swapped times is the complex conjugate.
    return std::conj(classical_isf_exact(model, p, t2, t1));
  }
  const std::size_t n = model.n_sites();
  Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    double out = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      generator(a, b) = model.rates[a][b];
      out += model.rates[a][b];
    }
    generator(a, a) = -out;
  }
  Eigen::VectorXd start(n);
  for (std::size_t a = 0; a < n; ++a) start[a] = model.initial[a];
  const Eigen::VectorXd occupancy = ((generator * t1).exp().transpose() * start).eval();
  const Eigen::MatrixXd transition = ((generator * (t2 - t1)).exp()).eval();

  Complex acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const Complex phase =
          std::exp(Complex(0.0, p.dot(model.positions[b] - model.positions[a])));
      acc += occupancy[a] * transition(a, b) * phase;
    }
  }
  return acc;
}

}  // namespace tdi
