#pragma once

// Exact Gaussian (first and second moment) dynamics.
//
// Quadrature ordering is (Q1, P1, ..., Qn, Pn) with vacuum covariance equal to
// the identity. Linear dynamics d mu/dt = A mu, d Sigma/dt = A Sigma + Sigma A^T + D.

#include <utility>

#include <Eigen/Dense>

#include "eprsim/lindblad.hpp"
#include "eprsim/moments.hpp"
#include "eprsim/nopa.hpp"

namespace eprsim::gaussian {

class CovarianceState {
 public:
  CovarianceState(RVector mean, RMatrix cov);

  static CovarianceState vacuum(int n_modes);
  static CovarianceState from_moments(const TwoModeMoments& m);

  const RVector& mean() const { return mean_; }
  const RMatrix& cov() const { return cov_; }
  int n_modes() const { return int(mean_.size() / 2); }

  // Smallest eigenvalue of Sigma + i Omega.
  double physicality_margin() const;
  bool is_physical(double tolerance = 1e-8) const { return physicality_margin() >= -tolerance; }

  // Covariance of the given modes only (e.g. the motional pair of the cascade).
  CovarianceState reduced(std::initializer_list<int> modes) const;

 private:
  RVector mean_;
  RMatrix cov_;
};

struct DriftDiffusion {
  RMatrix drift;
  RMatrix diffusion;

  int n_modes() const { return int(drift.rows() / 2); }
};

// Symplectic form Omega = diag([[0, 1], [-1, 0]], ...).
RMatrix symplectic_form(int n_modes);

// Moment equations of the two-mode master equation (including heating).
DriftDiffusion model_from_lindblad(const lindblad::LindbladModel& model);

// Solves A Sigma + Sigma A^T + D = 0. Throws NumericalFailure when the drift
// has an eigenvalue with non-negative real part or the residual exceeds 1e-10.
CovarianceState steady_covariance(const DriftDiffusion& dd);

CovarianceState evolve_covariance(const CovarianceState& state, const DriftDiffusion& dd, double t);

// Modes (c1, c2, b1, b2): the amplifier cavity modes feeding the two motional
// modes through a unidirectional link with no back-action.
DriftDiffusion cascade_model(const nopa::NopaParams& nopa, double gamma);

// K atoms driven together act as one collective mode coupled at K * gamma.
double collective_mode_map(int k_atoms, double gamma);

struct EprVariances {
  double var_sum_q;   // Var(Q1 + Q2)
  double var_diff_p;  // Var(P1 - P2)
};

EprVariances epr_variances(const CovarianceState& state);

}  // namespace eprsim::gaussian
