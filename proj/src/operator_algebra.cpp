#include "tdi/operator_algebra.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tdi {

namespace {

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

}  // namespace

void Tolerances::validate() const {
  if (!(algebraic_tol > 0.0) || !std::isfinite(algebraic_tol)) {
    fail("algebraic_tol must be a positive finite number");
  }
  if (!(statistical_sigma > 0.0) || !std::isfinite(statistical_sigma)) {
    fail("statistical_sigma must be a positive finite number");
  }
}

double max_abs(const Operator& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Operator& a) { return max_abs(a - a.adjoint().eval()); }

double unitarity_defect(const Operator& u) {
  Operator gram = u.adjoint() * u;
  gram -= Operator::Identity(u.rows(), u.cols());
  return max_abs(gram);
}

bool is_hermitian(const Operator& a, double tol) {
  return a.rows() == a.cols() && hermiticity_defect(a) < tol;
}

bool is_unitary(const Operator& u, double tol) {
  return u.rows() == u.cols() && unitarity_defect(u) < tol;
}

bool is_density(const Operator& mu, double tol) {
  if (!is_hermitian(mu, tol)) return false;
  if (std::abs(mu.trace() - Complex(1.0, 0.0)) >= tol) return false;
  return min_eigenvalue(mu) >= -tol;
}

void require_square(const Operator& a, const char* what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << what << ": expected a nonempty square matrix, got " << a.rows() << "x" << a.cols();
    fail(msg.str());
  }
}

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch, " << a.rows() << "x" << a.cols() << " vs " << b.rows()
        << "x" << b.cols();
    fail(msg.str());
  }
}

void require_hermitian(const Operator& a, double tol, const char* what) {
  require_square(a, what);
  const double defect = hermiticity_defect(a);
  if (!(defect < tol)) {
    std::ostringstream msg;
    msg << what << ": not Hermitian, max |A - A^dag| = " << defect << " (tol " << tol << ")";
    fail(msg.str());
  }
}

void require_unitary(const Operator& u, double tol, const char* what) {
  require_square(u, what);
  const double defect = unitarity_defect(u);
  if (!(defect < tol)) {
    std::ostringstream msg;
    msg << what << ": not unitary, max |U^dag U - 1| = " << defect << " (tol " << tol << ")";
    fail(msg.str());
  }
}

void require_density(const Operator& mu, double tol, const char* what) {
  require_hermitian(mu, tol, what);
  const Complex tr = mu.trace();
  if (!(std::abs(tr - Complex(1.0, 0.0)) < tol)) {
    std::ostringstream msg;
    msg << what << ": trace " << tr.real() << (tr.imag() < 0 ? "-" : "+") << std::abs(tr.imag())
        << "i differs from 1 (tol " << tol << ")";
    fail(msg.str());
  }
  const double lam = min_eigenvalue(mu);
  if (!(lam >= -tol)) {
    std::ostringstream msg;
    msg << what << ": negative eigenvalue " << lam << " (tol " << tol << ")";
    fail(msg.str());
  }
}

double min_eigenvalue(const Operator& a) {
  require_square(a, "min_eigenvalue");
  Operator sym = 0.5 * (a + a.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Operator> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail("min_eigenvalue: eigendecomposition failed");
  return solver.eigenvalues().minCoeff();
}

Operator expm_hermitian(const Operator& h, double t, double tol) {
  require_hermitian(h, tol, "expm_hermitian");
  if (h.rows() > kMaxDim) {
    std::ostringstream msg;
    msg << "expm_hermitian: dimension " << h.rows() << " exceeds the supported maximum "
        << kMaxDim;
    fail(msg.str());
  }
  if (!std::isfinite(t)) fail("expm_hermitian: time must be finite");
  Operator sym = 0.5 * (h + h.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
  if (solver.info() != Eigen::Success) fail("expm_hermitian: eigendecomposition failed");
  const Eigen::VectorXd& lam = solver.eigenvalues();
  const Operator& v = solver.eigenvectors();
  Eigen::VectorXcd phases(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    phases[k] = std::exp(Complex(0.0, -lam[k] * t));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

Operator evolve_density(const Operator& mu, const Operator& u, double tol) {
  require_density(mu, tol, "evolve_density");
  require_unitary(u, tol, "evolve_density");
  require_same_dim(mu, u, "evolve_density");
  return u * mu * u.adjoint();
}

Operator heisenberg(const Operator& a, const Operator& u) {
  require_square(a, "heisenberg");
  require_square(u, "heisenberg");
  require_same_dim(a, u, "heisenberg");
  return u.adjoint() * a * u;
}

Complex trace_product(const Operator& mu, const Operator& a, const Operator& b) {
  require_square(mu, "trace_product");
  require_same_dim(mu, a, "trace_product");
  require_same_dim(mu, b, "trace_product");
  return (mu * a * b).trace();
}

Operator pure_state_density(const StateVector& psi, double tol) {
  if (psi.size() == 0) fail("pure_state_density: empty state vector");
  const double norm = psi.norm();
  if (!(std::abs(norm - 1.0) < tol)) {
    std::ostringstream msg;
    msg << "pure_state_density: norm " << norm << " differs from 1 (tol " << tol << ")";
    fail(msg.str());
  }
  return psi * psi.adjoint();
}

}  // namespace tdi
