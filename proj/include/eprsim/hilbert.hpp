#pragma once

// Truncated Fock-space algebra for one or two bosonic modes.
//
// Two-mode index ordering: |m1, m2> lives at index m1 * n_max + m2, i.e. the
// mode-1 index varies slowest. All operators are dense; dimensions stay below
// a few thousand in practice.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace eprsim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-8;
inline constexpr double kNorm = 1e-12;
}  // namespace tol

class FockBasis {
 public:
  FockBasis(int n_max, int n_modes);

  static FockBasis single(int n_max) { return FockBasis(n_max, 1); }
  static FockBasis two_mode(int n_max) { return FockBasis(n_max, 2); }

  int n_max() const { return n_max_; }
  int n_modes() const { return n_modes_; }
  Eigen::Index dimension() const { return dimension_; }

  // Flat index of |m1, m2>; only valid for two-mode bases.
  Eigen::Index index(int m1, int m2) const { return Eigen::Index(m1) * n_max_ + m2; }

  // Fock level of `mode` for the flat basis index `i`.
  int level(Eigen::Index i, int mode) const;

  friend bool operator==(const FockBasis&, const FockBasis&) = default;

 private:
  int n_max_;
  int n_modes_;
  Eigen::Index dimension_;
};

class ModeOperator {
 public:
  ModeOperator(FockBasis basis, CMatrix elements);

  const FockBasis& basis() const { return basis_; }
  const CMatrix& matrix() const { return elements_; }

  ModeOperator operator+(const ModeOperator& other) const;
  ModeOperator operator-(const ModeOperator& other) const;
  ModeOperator operator*(Complex scale) const;

 private:
  FockBasis basis_;
  CMatrix elements_;
};

class PureState {
 public:
  PureState(FockBasis basis, CVector amplitudes);

  const FockBasis& basis() const { return basis_; }
  const CVector& amplitudes() const { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }

  // Throws std::domain_error on a zero or non-finite norm.
  PureState normalized() const;

  static PureState fock(const FockBasis& basis, Eigen::Index index);

 private:
  FockBasis basis_;
  CVector amplitudes_;
};

class DensityMatrix {
 public:
  DensityMatrix(FockBasis basis, CMatrix elements);

  const FockBasis& basis() const { return basis_; }
  const CMatrix& matrix() const { return elements_; }

  Complex trace() const { return elements_.trace(); }

  // Projects onto the Hermitian part and rescales to unit trace.
  DensityMatrix normalized() const;

  bool is_hermitian(double tolerance = tol::kHermitian) const;
  double min_eigenvalue() const;

  // Hermitian, unit trace and positive, each within its tolerance.
  bool is_valid(double hermitian_tol = tol::kHermitian, double trace_tol = tol::kTrace,
                double positivity_tol = tol::kPositivity) const;

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix vacuum(const FockBasis& basis);
  static DensityMatrix product(const DensityMatrix& mode1, const DensityMatrix& mode2);

 private:
  FockBasis basis_;
  CMatrix elements_;
};

ModeOperator identity_op(const FockBasis& basis);
ModeOperator annihilation_op(const FockBasis& basis, int mode_index);
ModeOperator creation_op(const FockBasis& basis, int mode_index);
ModeOperator number_op(const FockBasis& basis, int mode_index);

// Lifts a single-mode n_max x n_max matrix onto `mode_index` of `basis`.
ModeOperator embed(const CMatrix& single_mode, const FockBasis& basis, int mode_index);

ModeOperator adjoint(const ModeOperator& op);
ModeOperator compose(const ModeOperator& a, const ModeOperator& b);
ModeOperator commutator(const ModeOperator& a, const ModeOperator& b);

Complex expectation(const DensityMatrix& rho, const ModeOperator& op);
Complex expectation(const PureState& psi, const ModeOperator& op);

DensityMatrix partial_trace(const DensityMatrix& rho, int keep_mode);

// Marginal population held in the top `fraction` of Fock levels, maximised
// over modes. Used for truncation warnings.
double top_level_population(const DensityMatrix& rho, double fraction = 0.1);

// Smallest n_max such that the two-mode squeezed vacuum with parameter r
// leaves less than `tail` population above the truncation. Never below
// ceil(8 sinh^2 r + 10).
int recommended_n_max(double r, double tail = 1e-6);

}  // namespace eprsim
