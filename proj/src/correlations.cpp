#include "tdi/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tdi {

namespace {

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

bool separations_equal(const Vec3& a, const Vec3& b) {
  return (a - b).cwiseAbs().maxCoeff() < kPositionTol;
}

bool lex_less(const Vec3& a, const Vec3& b) {
  for (int k = 0; k < 3; ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

/// Tr[X Y] in O(dim^2) given both factors.
Complex trace_of_product(const Operator& x, const Operator& y) {
  return x.transpose().cwiseProduct(y).sum();
}

/// Shared setup for the pair-sum correlation: evolved state, Heisenberg-picture
/// site operators at the delay, and the per-site products mu(t1) rho_n.
struct PairSumContext {
  std::vector<Operator> left;        // mu(t1) * rho_n
  std::vector<Operator> site_at_dt;  // rho_m evolved by the delay
};

PairSumContext make_pair_sum_context(const TargetModel& model, double t1, double t2) {
  model.validate();
  if (!std::isfinite(t1) || !std::isfinite(t2)) fail("correlation times must be finite");
  PairSumContext ctx;
  const Operator mu1 = state_at(model, t1);
  const Operator w_delay = propagator(model.hamiltonian, t2 - t1);
  const std::size_t n = model.lattice.n_sites();
  ctx.left.reserve(n);
  ctx.site_at_dt.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    ctx.left.push_back(mu1 * model.lattice.site_ops[k]);
    ctx.site_at_dt.push_back(heisenberg(model.lattice.site_ops[k], w_delay));
  }
  return ctx;
}

}  // namespace

void ISFValue::validate(double tol) const {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    fail("isf: non-finite value");
  }
  if (t1 == t2) {
    if (!(std::abs(value.imag()) < tol)) {
      std::ostringstream msg;
      msg << "isf: imaginary part " << value.imag() << " at equal times (tol " << tol << ")";
      fail(msg.str());
    }
    if (!(value.real() >= -tol)) {
      std::ostringstream msg;
      msg << "isf: negative value " << value.real() << " at equal times (tol " << tol << ")";
      fail(msg.str());
    }
  }
}

std::vector<Vec3> lattice_separations(const TargetModel& model) {
  model.validate();
  const auto& sites = model.lattice.sites;
  std::vector<Vec3> seps;
  seps.reserve(sites.size() * sites.size());
  for (const Vec3& from : sites) {
    for (const Vec3& to : sites) {
      seps.push_back(to - from);
    }
  }
  std::sort(seps.begin(), seps.end(), lex_less);
  std::vector<Vec3> unique;
  for (const Vec3& r : seps) {
    if (unique.empty() || !separations_equal(unique.back(), r)) unique.push_back(r);
  }
  return unique;
}

Complex dcf(const TargetModel& model, const Vec3& r, double t1, double t2) {
  if (!r.allFinite()) fail("dcf: separation must be finite");
  const PairSumContext ctx = make_pair_sum_context(model, t1, t2);
  const auto& sites = model.lattice.sites;
  Complex acc = 0.0;
  for (std::size_t n = 0; n < sites.size(); ++n) {
    for (std::size_t m = 0; m < sites.size(); ++m) {
      if (separations_equal(sites[m] - sites[n], r)) {
        acc += trace_of_product(ctx.left[n], ctx.site_at_dt[m]);
      }
    }
  }
  return acc;
}

std::vector<SeparationValue> dcf_all(const TargetModel& model, double t1, double t2) {
  const PairSumContext ctx = make_pair_sum_context(model, t1, t2);
  const std::vector<Vec3> seps = lattice_separations(model);
  const auto& sites = model.lattice.sites;

  std::vector<SeparationValue> result;
  result.reserve(seps.size());
  for (const Vec3& r : seps) result.push_back({r, Complex(0.0, 0.0)});

  // Entries of seps are lexicographically sorted, so every candidate match for
  // r (within kPositionTol per component) lies in the contiguous block whose
  // x component falls inside [r.x - tol, r.x + tol].
  const auto locate = [&seps](const Vec3& r) -> std::size_t {
    const auto it = std::lower_bound(seps.begin(), seps.end(), r, lex_less);
    for (auto fwd = it; fwd != seps.end() && (*fwd)[0] <= r[0] + kPositionTol; ++fwd) {
      if (separations_equal(*fwd, r)) return static_cast<std::size_t>(fwd - seps.begin());
    }
    for (auto bwd = it; bwd != seps.begin();) {
      --bwd;
      if ((*bwd)[0] < r[0] - kPositionTol) break;
      if (separations_equal(*bwd, r)) return static_cast<std::size_t>(bwd - seps.begin());
    }
    fail("dcf_all: separation lookup failed");
  };

  for (std::size_t n = 0; n < sites.size(); ++n) {
    for (std::size_t m = 0; m < sites.size(); ++m) {
      const Vec3 r = sites[m] - sites[n];
      const Complex term = trace_of_product(ctx.left[n], ctx.site_at_dt[m]);
      result[locate(r)].value += term;
    }
  }
  return result;
}

ISFValue isf(const TargetModel& model, const Vec3& p, double t1, double t2) {
  model.validate();
  if (!p.allFinite()) fail("isf: momentum must be finite");
  if (!std::isfinite(t1) || !std::isfinite(t2)) fail("isf: times must be finite");
  const Operator d1 = density_fourier(model, p, t1);
  const Operator d2 = density_fourier(model, p, t2);
  ISFValue out;
  out.value = trace_product(model.initial, d1.adjoint(), d2);
  out.p = p;
  out.t1 = t1;
  out.t2 = t2;
  out.validate();
  return out;
}

Complex isf_from_dcf(const TargetModel& model, const Vec3& p, double t1, double t2) {
  if (!p.allFinite()) fail("isf_from_dcf: momentum must be finite");
  Complex acc = 0.0;
  for (const SeparationValue& g : dcf_all(model, t1, t2)) {
    acc += g.value * std::exp(Complex(0.0, p.dot(g.r)));
  }
  return acc;
}

SymmetryCheck check_quantum_symmetry(const TargetModel& model, const Vec3& p, double t1,
                                     double t2, double tol) {
  const Complex forward = isf(model, p, t1, t2).value;
  const Complex reversed = isf(model, p, t2, t1).value;
  SymmetryCheck check;
  check.residual = std::abs(std::conj(forward) - reversed);
  check.threshold = tol;
  check.ok = check.residual < tol;
  return check;
}

SymmetryCheck check_classical_symmetry(const TargetModel& model, const Vec3& p, double t1,
                                       double t2, double tol) {
  const Complex at_p = isf(model, p, t1, t2).value;
  const Complex at_minus_p = isf(model, (-p).eval(), t1, t2).value;
  SymmetryCheck check;
  check.residual = std::abs(std::conj(at_p) - at_minus_p);
  check.threshold = tol;
  check.ok = check.residual < tol;
  return check;
}

SymmetryCheck check_classical_symmetry(const ClassicalModel& model, const Vec3& p, double t1,
                                       double t2, double tol) {
  const Complex at_p = classical_isf_exact(model, p, t1, t2);
  const Complex at_minus_p = classical_isf_exact(model, (-p).eval(), t1, t2);
  SymmetryCheck check;
  check.residual = std::abs(std::conj(at_p) - at_minus_p);
  check.threshold = tol;
  check.ok = check.residual < tol;
  return check;
}

SymmetryCheck check_classical_symmetry(const MCEstimate& s_plus_p, const MCEstimate& s_minus_p,
                                       const Tolerances& tol) {
  tol.validate();
  SymmetryCheck check;
  check.residual = std::abs(std::conj(s_plus_p.mean) - s_minus_p.mean);
  check.threshold = tol.algebraic_tol +
                    tol.statistical_sigma *
                        std::hypot(s_plus_p.std_error(), s_minus_p.std_error());
  check.ok = check.residual < check.threshold;
  return check;
}

}  // namespace tdi
