#pragma once

// Entanglement and nonlocality diagnostics for the two-mode motional state.

#include <complex>

#include "eprsim/gaussian.hpp"
#include "eprsim/hilbert.hpp"

namespace eprsim::metrics {

double fidelity(const DensityMatrix& rho, const PureState& target);

double mean_phonon(const DensityMatrix& rho, int mode_index);

struct EprCriterion {
  double value;  // Var(Q1 + Q2) + Var(P1 - P2)
  bool entangled;
};

// Separable states satisfy value >= 4 when the vacuum quadrature variance is 1.
inline constexpr double kSeparableBound = 4.0;

EprCriterion epr_criterion(double var_sum_q, double var_diff_p);

// Displacements larger than this are refused: the truncated basis cannot
// represent the displaced parity reliably.
inline constexpr double kDefaultMaxDisplacement = 3.0;

struct BellSettings {
  Complex alpha1, alpha2;  // atom 1
  Complex beta1, beta2;    // atom 2
  double max_magnitude = kDefaultMaxDisplacement;

  void validate() const;
};

struct ParityCorrelation {
  double value;
  bool truncation_warning;
};

// E(alpha, beta) = <D1(alpha) D2(beta) Pi1 Pi2 D2(beta)^dagger D1(alpha)^dagger>.
ParityCorrelation parity_correlation(const DensityMatrix& rho, Complex alpha, Complex beta,
                                     double max_magnitude = kDefaultMaxDisplacement);

// B = E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2).
double chsh_value(const DensityMatrix& rho, const BellSettings& s);

// Pure-state variants: O(n_max^3) per correlator instead of O(n_max^4).
ParityCorrelation parity_correlation(const PureState& psi, Complex alpha, Complex beta,
                                     double max_magnitude = kDefaultMaxDisplacement);
double chsh_value(const PureState& psi, const BellSettings& s);

// Base-2 logarithmic negativity of a two-mode Gaussian state.
double log_negativity(const gaussian::CovarianceState& state);

}  // namespace eprsim::metrics
