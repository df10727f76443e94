#include "tdi/target_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tdi {

namespace {

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

bool positions_equal(const Vec3& a, const Vec3& b) {
  return (a - b).cwiseAbs().maxCoeff() < kPositionTol;
}

void require_finite(const Operator& a, const char* what) {
  if (!a.allFinite()) fail(std::string(what) + ": non-finite matrix entry");
}

}  // namespace

void SiteLattice::validate(const Tolerances& tol) const {
  tol.validate();
  if (sites.empty()) fail("lattice: no sites");
  if (sites.size() != site_ops.size()) {
    std::ostringstream msg;
    msg << "lattice: " << sites.size() << " positions but " << site_ops.size()
        << " site operators";
    fail(msg.str());
  }
  for (const Vec3& r : sites) {
    if (!r.allFinite()) fail("lattice: non-finite site position");
  }
  const int d = dim();
  if (d <= 0) fail("lattice: empty site operator");
  if (d > kMaxDim) {
    std::ostringstream msg;
    msg << "lattice: dimension " << d << " exceeds the supported maximum " << kMaxDim;
    fail(msg.str());
  }
  for (std::size_t n = 0; n < site_ops.size(); ++n) {
    const Operator& op = site_ops[n];
    require_finite(op, "lattice site operator");
    if (op.rows() != d || op.cols() != d) fail("lattice: site operators differ in dimension");
    require_hermitian(op, tol.algebraic_tol, "lattice site operator");
    const double lam = min_eigenvalue(op);
    if (!(lam >= -tol.algebraic_tol)) {
      std::ostringstream msg;
      msg << "lattice: site operator " << n << " has negative eigenvalue " << lam;
      fail(msg.str());
    }
  }
  for (std::size_t a = 0; a < sites.size(); ++a) {
    for (std::size_t b = a + 1; b < sites.size(); ++b) {
      if (positions_equal(sites[a], sites[b])) {
        std::ostringstream msg;
        msg << "lattice: sites " << a << " and " << b << " coincide";
        fail(msg.str());
      }
    }
  }
}

void TargetModel::validate(const Tolerances& tol) const {
  lattice.validate(tol);
  require_finite(hamiltonian, "hamiltonian");
  require_hermitian(hamiltonian, tol.algebraic_tol, "hamiltonian");
  if (hamiltonian.rows() != dim()) fail("hamiltonian dimension does not match the lattice");
  require_finite(initial, "initial state");
  require_density(initial, tol.algebraic_tol, "initial state");
  if (initial.rows() != dim()) fail("initial state dimension does not match the lattice");
}

TargetModel build_double_well(double omega, const Vec3& d, double p_left, Complex gamma) {
  if (!std::isfinite(omega)) fail("build_double_well: omega must be finite");
  if (!d.allFinite()) fail("build_double_well: separation must be finite");
  if (d.cwiseAbs().maxCoeff() < kPositionTol) {
    fail("build_double_well: site separation must be nonzero");
  }
  if (!(p_left >= 0.0 && p_left <= 1.0)) {
    std::ostringstream msg;
    msg << "build_double_well: p_left = " << p_left << " outside [0, 1]";
    fail(msg.str());
  }

  Operator mu(2, 2);
  mu << Complex(p_left, 0.0), gamma, std::conj(gamma), Complex(1.0 - p_left, 0.0);
  const double lam = min_eigenvalue(mu);
  if (!(lam >= -1e-10)) {
    std::ostringstream msg;
    msg << "build_double_well: |gamma|^2 > p_left (1 - p_left); state has eigenvalue " << lam;
    fail(msg.str());
  }

  TargetModel model;
  model.lattice.sites = {-0.5 * d, 0.5 * d};
  Operator rho_l = Operator::Zero(2, 2);
  rho_l(0, 0) = 1.0;
  Operator rho_r = Operator::Zero(2, 2);
  rho_r(1, 1) = 1.0;
  model.lattice.site_ops = {rho_l, rho_r};
  model.hamiltonian = Operator::Zero(2, 2);
  model.hamiltonian(0, 1) = -0.5 * omega;
  model.hamiltonian(1, 0) = -0.5 * omega;
  model.initial = mu;
  model.id = "doublewell";
  model.validate();
  return model;
}

TargetModel build_chain(int n_sites, double hop, double spacing) {
  if (n_sites < 2 || n_sites > kMaxDim) {
    std::ostringstream msg;
    msg << "build_chain: n_sites = " << n_sites << " outside [2, " << kMaxDim << "]";
    fail(msg.str());
  }
  if (!std::isfinite(hop)) fail("build_chain: hop must be finite");
  if (!std::isfinite(spacing) || std::abs(spacing) < kPositionTol) {
    fail("build_chain: spacing must be finite and nonzero");
  }

  TargetModel model;
  model.lattice.sites.reserve(n_sites);
  model.lattice.site_ops.reserve(n_sites);
  for (int n = 0; n < n_sites; ++n) {
    model.lattice.sites.push_back(Vec3(n * spacing, 0.0, 0.0));
    Operator proj = Operator::Zero(n_sites, n_sites);
    proj(n, n) = 1.0;
    model.lattice.site_ops.push_back(proj);
  }
  model.hamiltonian = Operator::Zero(n_sites, n_sites);
  for (int n = 0; n + 1 < n_sites; ++n) {
    model.hamiltonian(n, n + 1) = -hop;
    model.hamiltonian(n + 1, n) = -hop;
  }
  model.initial = Operator::Zero(n_sites, n_sites);
  model.initial(0, 0) = 1.0;
  model.id = "chain";
  model.validate();
  return model;
}

TargetModel with_initial(TargetModel model, const Operator& mu) {
  require_density(mu, 1e-10, "with_initial");
  if (mu.rows() != model.dim()) fail("with_initial: dimension mismatch with the model");
  model.initial = mu;
  return model;
}

Operator propagator(const Operator& hamiltonian, double t, double tol) {
  return expm_hermitian(hamiltonian, -t, tol);
}

Operator state_at(const TargetModel& model, double t) {
  return evolve_density(model.initial, propagator(model.hamiltonian, t));
}

Operator density_fourier(const TargetModel& model, const Vec3& p, double t) {
  if (!p.allFinite()) fail("density_fourier: momentum must be finite");
  const Operator w = propagator(model.hamiltonian, t);
  Operator result = Operator::Zero(model.dim(), model.dim());
  for (std::size_t n = 0; n < model.lattice.n_sites(); ++n) {
    const Complex phase = std::exp(Complex(0.0, p.dot(model.lattice.sites[n])));
    result += phase * (w.adjoint() * model.lattice.site_ops[n] * w);
  }
  return result;
}

}  // namespace tdi
