#pragma once

#include <Eigen/Dense>
#include <complex>

namespace tdi {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Vec3 = Eigen::Vector3d;

/// Largest operator dimension the exact (dense eigendecomposition) kernels accept.
inline constexpr int kMaxDim = 64;

/// Shared numerical tolerances.
///   algebraic_tol    bound for exact identities evaluated in floating point
///   statistical_sigma  number of standard errors for Monte Carlo comparisons
struct Tolerances {
  double algebraic_tol = 1e-10;
  double statistical_sigma = 5.0;
  void validate() const;
};

/// Max-entry absolute value, the norm used by every defect measure here.
double max_abs(const Operator& a);

/// ||A - A^dag||_max
double hermiticity_defect(const Operator& a);
/// ||U^dag U - 1||_max
double unitarity_defect(const Operator& u);

bool is_hermitian(const Operator& a, double tol = 1e-10);
bool is_unitary(const Operator& u, double tol = 1e-10);
/// Hermitian, unit trace within tol, eigenvalues >= -tol.
bool is_density(const Operator& mu, double tol = 1e-10);

void require_square(const Operator& a, const char* what);
void require_same_dim(const Operator& a, const Operator& b, const char* what);
void require_hermitian(const Operator& a, double tol, const char* what);
void require_unitary(const Operator& u, double tol, const char* what);
void require_density(const Operator& mu, double tol, const char* what);

/// Smallest eigenvalue of a Hermitian operator (input is symmetrized first).
double min_eigenvalue(const Operator& a);

/// U(t) = exp(-i H t) for Hermitian H via eigendecomposition.
/// Unitary by construction; dim <= kMaxDim enforced.
Operator expm_hermitian(const Operator& h, double t, double tol = 1e-10);

/// Schroedinger step for a density matrix: U mu U^dag.
Operator evolve_density(const Operator& mu, const Operator& u, double tol = 1e-10);

/// Conjugation of an observable by a propagator: U^dag A U.
Operator heisenberg(const Operator& a, const Operator& u);

/// Tr[mu A B]
Complex trace_product(const Operator& mu, const Operator& a, const Operator& b);

/// |psi><psi| for a state vector with unit norm within tol.
Operator pure_state_density(const StateVector& psi, double tol = 1e-10);

}  // namespace tdi
