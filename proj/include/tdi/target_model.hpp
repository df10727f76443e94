#pragma once

#include <string>
#include <vector>

#include "tdi/operator_algebra.hpp"

namespace tdi {

/// Two site positions are treated as equal when every component differs by
/// less than this.
inline constexpr double kPositionTol = 1e-9;

/// Scattering sites: positions r_n and the matching site density operators
/// rho_n, all acting on one Hilbert space.
struct SiteLattice {
  std::vector<Vec3> sites;
  std::vector<Operator> site_ops;

  int dim() const { return site_ops.empty() ? 0 : static_cast<int>(site_ops.front().rows()); }
  std::size_t n_sites() const { return sites.size(); }
  void validate(const Tolerances& tol = {}) const;
};

/// A concrete quantum target: lattice, Hamiltonian and initial state
/// (stored as a density matrix; pure states enter as projectors).
struct TargetModel {
  SiteLattice lattice;
  Operator hamiltonian;
  Operator initial;
  std::string id;

  int dim() const { return lattice.dim(); }
  void validate(const Tolerances& tol = {}) const;
};

/// Two-site double well: |L> at -d/2, |R> at +d/2, H = -(omega/2)(|L><R| + |R><L|),
/// initial state [[p_left, gamma], [conj(gamma), 1 - p_left]].
/// The L/R placement makes the ordered pair (L, R) carry separation +d.
TargetModel build_double_well(double omega, const Vec3& d, double p_left, Complex gamma);

/// Open nearest-neighbour chain of n_sites (2..64) sites at n*spacing along x,
/// hopping amplitude -hop, initial state localized on site 0.
TargetModel build_chain(int n_sites, double hop, double spacing);

/// Copy of a model with a replacement initial density matrix.
TargetModel with_initial(TargetModel model, const Operator& mu);

/// Propagator driving every correlation and signal evaluation: W(t) = exp(+i H t).
/// The sign is load-bearing: with W(t), the two-site closed forms come out as
/// G(+d) = S^2 P_L + (i/2) S' conj(Gamma) and the conjugation symmetry
/// G(r,t1,t2)* = G(-r,t2,t1) holds for every model; the opposite sign flips the
/// imaginary part of every S' term.
Operator propagator(const Operator& hamiltonian, double t, double tol = 1e-10);

/// State at time t: W(t) mu W(t)^dag.
Operator state_at(const TargetModel& model, double t);

/// Site-density Fourier transform at time t:
///   D(p, t) = sum_n exp(i p . r_n) W(t)^dag rho_n W(t).
/// D(0, t) is the conserved total density; D(p,t)^dag = D(-p,t).
Operator density_fourier(const TargetModel& model, const Vec3& p, double t);

}  // namespace tdi
