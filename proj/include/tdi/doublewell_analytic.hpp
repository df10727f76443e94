#pragma once

#include <vector>

#include "tdi/target_model.hpp"

namespace tdi {

/// Parameters of the two-site target in closed-form notation: occupation
/// p_left, coherence gamma (off-diagonal element of the initial state),
/// tunneling frequency omega, site separation vector d.
struct DoubleWellState {
  double p_left = 0.5;
  Complex gamma = 0.0;
  double omega = 1.0;
  Vec3 d = Vec3::UnitX();
  void validate(double tol = 1e-10) const;
  TargetModel to_model() const;
};

/// Trigonometric factors of the two-site closed forms at delay dt:
///   s = sin(omega dt / 2), c = cos(omega dt / 2), s_full = sin(omega dt).
/// Identities s^2 + c^2 = 1 and s_full = 2 s c hold to rounding.
struct TrigFactors {
  double s = 0.0;
  double c = 1.0;
  double s_full = 0.0;
  static TrigFactors at(double omega, double dt);
};

/// The three possible separations of the two-site lattice.
enum class Separation { minus_d, zero, plus_d };

/// A closed-form expression evaluated next to the numeric engine:
///   literal         - the closed form transcribed as-is;
///   literal_squared - the same form with first-power trig factors replaced
///                     by their squares (c -> c^2, s -> s^2);
///   oracle          - the numeric evaluation (ground truth);
///   abs_diff        - |literal - oracle|.
/// For the same-site correlation and the averaged pair correlations the
/// square substitution repairs the literal form exactly (literal_squared
/// equals the oracle); the ISF coherence terms differ in a different way,
/// which is reported via abs_diff rather than repaired.
struct AnalyticComparison {
  Complex literal;
  Complex literal_squared;
  Complex oracle;
  double abs_diff = 0.0;
};

/// Couple correlation of the two-site target at delay dt from time 0:
///   literal  G(+d) = s^2 p_left + (i/2) s_full conj(gamma)
///            G(-d) = s^2 (1 - p_left) + (i/2) s_full gamma
///            G(0)  = c - i s_full Re(gamma)          [first power of c]
/// The numeric oracle reproduces these with c^2 in G(0); the +-d forms
/// already use s^2 and match the oracle directly.
AnalyticComparison dcf_analytic(const DoubleWellState& state, double dt, Separation r);

/// Intermediate scattering function of the two-site target at delay dt:
///   literal Re = c^2 + s^2 cos(p.d)
///   literal Im = (2 p_left - 1) s^2 sin(p.d)
///              + (s_full/2) [ Im(gamma) sin(p.d) + Re(gamma) (cos(p.d) - 2) ]
/// The numeric oracle matches the real part and the coherence-free imaginary
/// part exactly; its coherence terms carry s_full (not s_full/2) and
/// (cos(p.d) - 1) in place of (cos(p.d) - 2).
AnalyticComparison isf_analytic(const DoubleWellState& state, double dt, const Vec3& p);

/// ISF averaged uniformly over the first scattering time across one period:
///   literal = s^2 cos(p.d) + c^2 + (i/2)(cos(p.d) - 2) s_full Re(gamma)
/// compared against the numeric average of the engine ISF over >= 64 samples
/// (exact for this band-limited integrand).
AnalyticComparison averaged_isf(const DoubleWellState& state, double dt, const Vec3& p);

/// Couple correlation averaged the same way:
///   literal  Gbar(+-d) = s/2 + (i/2) s_full Re(gamma)   [first power of s]
///            Gbar(0)   = c - i s_full Re(gamma)          [first power of c]
/// The numeric average carries s^2/2 and c^2 instead.
AnalyticComparison averaged_dcf(const DoubleWellState& state, double dt, Separation r);

/// Maximum drift of Re(gamma) of the evolved state over the grid:
/// max_t |Re gamma(t) - Re gamma(0)|. Re(gamma) is a constant of motion of
/// the two-site Hamiltonian, so this must vanish to rounding.
double gamma_r_invariant(const DoubleWellState& state, const std::vector<double>& t_grid);

}  // namespace tdi
