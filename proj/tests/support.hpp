#pragma once

// Independent reference constructions shared by the unit tests.

#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "eprsim/hilbert.hpp"

namespace eprsim::testing {

inline CMatrix ladder(int n) {
  CMatrix b = CMatrix::Zero(n, n);
  for (int m = 1; m < n; ++m) b(m - 1, m) = std::sqrt(double(m));
  return b;
}

// Mode 1 slowest: A (x) B.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

inline DensityMatrix random_density(const FockBasis& basis, unsigned seed, int rank = 3) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  const Eigen::Index d = basis.dimension();
  CMatrix a(d, rank);
  for (Eigen::Index i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = Complex(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace();
  return {basis, rho};
}

inline PureState random_pure(const FockBasis& basis, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  CVector v(basis.dimension());
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return PureState(basis, v).normalized();
}

// vec(A X B) = (B^T (x) A) vec(X), column-major vec
inline CMatrix sandwich(const CMatrix& a, const CMatrix& b) { return kron(b.transpose(), a); }

}  // namespace eprsim::testing
