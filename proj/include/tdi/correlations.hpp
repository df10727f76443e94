#pragma once

#include <vector>

#include "tdi/classical.hpp"
#include "tdi/target_model.hpp"

namespace tdi {

/// One evaluated intermediate-scattering-function point.
/// At t1 == t2 the value must be real and nonnegative (within tolerance).
struct ISFValue {
  Complex value;
  Vec3 p = Vec3::Zero();
  double t1 = 0.0;
  double t2 = 0.0;
  void validate(double tol = 1e-10) const;
};

struct SeparationValue {
  Vec3 r;
  Complex value;
};

/// All distinct pair-difference vectors r_m - r_n of the lattice (0 included),
/// deduplicated within kPositionTol, sorted lexicographically.
std::vector<Vec3> lattice_separations(const TargetModel& model);

/// Couple correlation at separation r:
///   G(r, t1, t2) = sum over ordered site pairs (n, m) with r_m - r_n = r of
///                  Tr[ mu(t1) rho_n rho_m(t2 - t1) ]
/// with mu(t1) the evolved state and rho_m(dt) the Heisenberg-picture site
/// operator (conventions pinned in propagator()). Pair matching uses
/// kPositionTol; a separation matching no pair yields 0. Times may be in any
/// order and are never swapped internally.
Complex dcf(const TargetModel& model, const Vec3& r, double t1, double t2);

/// G at every lattice separation in one pass (same conventions as dcf).
std::vector<SeparationValue> dcf_all(const TargetModel& model, double t1, double t2);

/// Intermediate scattering function S(p, t1, t2) = Tr[mu D(p,t1)^dag D(p,t2)].
/// Equals the discrete Fourier sum  sum_r G(r,t1,t2) e^{i p . r}.
ISFValue isf(const TargetModel& model, const Vec3& p, double t1, double t2);

/// The explicit Fourier-sum route over dcf_all; cross-check for isf.
Complex isf_from_dcf(const TargetModel& model, const Vec3& p, double t1, double t2);

struct SymmetryCheck {
  bool ok = false;
  double residual = 0.0;
  double threshold = 0.0;
};

/// Quantum conjugation symmetry: residual |S(p,t1,t2)* - S(p,t2,t1)|,
/// which vanishes identically for unitary dynamics.
SymmetryCheck check_quantum_symmetry(const TargetModel& model, const Vec3& p, double t1,
                                     double t2, double tol = 1e-10);

/// Classical-statistics symmetry: residual |S(p,t1,t2)* - S(-p,t1,t2)|.
/// Holds for any classical jump process; generally violated by quantum targets.
SymmetryCheck check_classical_symmetry(const TargetModel& model, const Vec3& p, double t1,
                                       double t2, double tol = 1e-10);
SymmetryCheck check_classical_symmetry(const ClassicalModel& model, const Vec3& p, double t1,
                                       double t2, double tol = 1e-10);
/// Monte Carlo variant on two independently estimated channels; the pass
/// threshold is tol.algebraic_tol plus statistical_sigma times the combined
/// standard error.
SymmetryCheck check_classical_symmetry(const MCEstimate& s_plus_p, const MCEstimate& s_minus_p,
                                       const Tolerances& tol = {});

}  // namespace tdi
