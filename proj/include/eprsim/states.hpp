#pragma once

// Two-mode squeezed vacuum, squeezing/displacement/parity operators and
// Wigner functions.
//
// Phase-space convention: a mode with complex amplitude alpha sits at
// (q, p) = (Re alpha, Im alpha), so Q = b + b^dagger has expectation 2q. In
// these coordinates the two-mode vacuum Wigner function peaks at 4/pi^2 and
// every Wigner function integrates to 1 over dq1 dp1 dq2 dp2.

#include <complex>
#include <vector>

#include "eprsim/hilbert.hpp"

namespace eprsim::states {

struct TmssSpec {
  explicit TmssSpec(double r);
  double r;
};

// Untruncated amplitude of |m, m>: (-tanh r)^m / cosh r.
double tmss_amplitude(const TmssSpec& spec, int m);

// Two-mode squeezed vacuum restricted to the basis and renormalized.
PureState tmss_fock(const TmssSpec& spec, const FockBasis& basis);

// exp[r (b1 b2 - b1^dagger b2^dagger)] on the truncated two-mode space.
ModeOperator squeeze_unitary(const TmssSpec& spec, const FockBasis& basis);

// exp(alpha b^dagger - alpha^* b) on `mode_index`, from the truncated generator.
ModeOperator displacement_op(Complex alpha, const FockBasis& basis, int mode_index);

// (-1)^m on `mode_index`.
ModeOperator parity_op(const FockBasis& basis, int mode_index);

// Single-mode matrix of the displaced parity D(alpha) Pi D(alpha)^dagger,
// using the exact (untruncated) matrix elements of D(2 alpha) restricted to
// levels 0..n_max-1. Exact for any state supported inside the truncation.
CMatrix displaced_parity(Complex alpha, int n_max);

// Tr[rho (P1 x P2)] for single-mode matrices P1, P2 on a two-mode rho.
Complex two_mode_expectation(const DensityMatrix& rho, const CMatrix& op1, const CMatrix& op2);

double wigner_analytic(const TmssSpec& spec, double q1, double p1, double q2, double p2);

// Regular grid over (q1, p1, q2, p2); values flattened with q1 slowest.
struct WignerGrid {
  std::vector<double> q1, p1, q2, p2;
  std::vector<double> values;
  bool truncation_warning = false;

  std::size_t size() const { return q1.size() * p1.size() * q2.size() * p2.size(); }
  std::size_t flat_index(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return ((i * p1.size() + j) * q2.size() + k) * p2.size() + l;
  }

  static WignerGrid uniform(double lo, double hi, std::size_t points);
};

WignerGrid wigner_analytic_grid(const TmssSpec& spec, WignerGrid grid);

// W = (2/pi)^2 <D1 D2 Pi1 Pi2 D2^dagger D1^dagger> with alpha_j = q_j + i p_j.
// Sets truncation_warning when more than 1e-4 of the population sits in the
// top 10% of Fock levels.
WignerGrid wigner_from_density(const DensityMatrix& rho, WignerGrid grid);

inline constexpr double kTruncationWarnPopulation = 1e-4;

}  // namespace eprsim::states
