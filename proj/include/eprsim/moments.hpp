#pragma once

#include <array>

#include "eprsim/hilbert.hpp"

namespace eprsim {

// First and second moments of a two-mode state, with quadratures
// R = (Q1, P1, Q2, P2), Q = b + b^dagger, P = -i(b - b^dagger).
// Covariances are symmetrized: cov_ij = <{R_i, R_j}>/2 - <R_i><R_j>.
struct TwoModeMoments {
  double n1 = 0.0;                // <b1^dagger b1>
  double n2 = 0.0;                // <b2^dagger b2>
  Complex b1b2 = 0.0;             // <b1 b2>
  Complex b1b2dag = 0.0;          // <b1 b2^dagger>
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
};

// Moments evaluated with the truncated operators of rho's basis.
TwoModeMoments two_mode_moments(const DensityMatrix& rho);

}  // namespace eprsim
