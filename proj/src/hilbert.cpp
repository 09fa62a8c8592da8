#include "eprsim/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace eprsim {

namespace {

void require_same_basis(const FockBasis& a, const FockBasis& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": basis mismatch");
}

void require_mode(const FockBasis& basis, int mode_index) {
  if (mode_index < 0 || mode_index >= basis.n_modes())
    throw std::out_of_range("mode index " + std::to_string(mode_index) + " out of range for " +
                            std::to_string(basis.n_modes()) + "-mode basis");
}

CMatrix ladder(int n_max) {
  CMatrix b = CMatrix::Zero(n_max, n_max);
  for (int m = 1; m < n_max; ++m) b(m - 1, m) = std::sqrt(double(m));
  return b;
}

}  // namespace

FockBasis::FockBasis(int n_max, int n_modes) : n_max_(n_max), n_modes_(n_modes) {
  if (n_max < 2) throw std::invalid_argument("FockBasis: n_max must be >= 2");
  if (n_modes != 1 && n_modes != 2) throw std::invalid_argument("FockBasis: n_modes must be 1 or 2");
  dimension_ = n_modes == 1 ? n_max : Eigen::Index(n_max) * n_max;
}

int FockBasis::level(Eigen::Index i, int mode) const {
  if (n_modes_ == 1) return int(i);
  return mode == 0 ? int(i / n_max_) : int(i % n_max_);
}

ModeOperator::ModeOperator(FockBasis basis, CMatrix elements)
    : basis_(basis), elements_(std::move(elements)) {
  if (elements_.rows() != basis_.dimension() || elements_.cols() != basis_.dimension())
    throw std::invalid_argument("ModeOperator: matrix size does not match basis dimension");
}

ModeOperator ModeOperator::operator+(const ModeOperator& other) const {
  require_same_basis(basis_, other.basis_, "operator+");
  return {basis_, elements_ + other.elements_};
}

ModeOperator ModeOperator::operator-(const ModeOperator& other) const {
  require_same_basis(basis_, other.basis_, "operator-");
  return {basis_, elements_ - other.elements_};
}

ModeOperator ModeOperator::operator*(Complex scale) const { return {basis_, elements_ * scale}; }

PureState::PureState(FockBasis basis, CVector amplitudes)
    : basis_(basis), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != basis_.dimension())
    throw std::invalid_argument("PureState: amplitude count does not match basis dimension");
  if (!amplitudes_.allFinite()) throw std::domain_error("PureState: non-finite amplitudes");
}

PureState PureState::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::domain_error("PureState: cannot normalize zero vector");
  return {basis_, amplitudes_ / n};
}

PureState PureState::fock(const FockBasis& basis, Eigen::Index index) {
  CVector v = CVector::Zero(basis.dimension());
  v(index) = 1.0;
  return {basis, v};
}

DensityMatrix::DensityMatrix(FockBasis basis, CMatrix elements)
    : basis_(basis), elements_(std::move(elements)) {
  if (elements_.rows() != basis_.dimension() || elements_.cols() != basis_.dimension())
    throw std::invalid_argument("DensityMatrix: matrix size does not match basis dimension");
}

DensityMatrix DensityMatrix::normalized() const {
  CMatrix h = 0.5 * (elements_ + elements_.adjoint());
  const double t = h.trace().real();
  if (!(std::abs(t) > 0.0)) throw std::domain_error("DensityMatrix: zero trace");
  return {basis_, h / t};
}

bool DensityMatrix::is_hermitian(double tolerance) const {
  return (elements_ - elements_.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(elements_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool DensityMatrix::is_valid(double hermitian_tol, double trace_tol, double positivity_tol) const {
  if (!is_hermitian(hermitian_tol)) return false;
  if (std::abs(trace() - 1.0) > trace_tol) return false;
  return min_eigenvalue() >= -positivity_tol;
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return {psi.basis(), psi.amplitudes() * psi.amplitudes().adjoint()};
}

DensityMatrix DensityMatrix::vacuum(const FockBasis& basis) {
  CMatrix m = CMatrix::Zero(basis.dimension(), basis.dimension());
  m(0, 0) = 1.0;
  return {basis, m};
}

DensityMatrix DensityMatrix::product(const DensityMatrix& mode1, const DensityMatrix& mode2) {
  if (mode1.basis().n_modes() != 1 || mode2.basis().n_modes() != 1 ||
      mode1.basis().n_max() != mode2.basis().n_max())
    throw std::invalid_argument("DensityMatrix::product: need two single-mode states of equal n_max");
  CMatrix m = Eigen::kroneckerProduct(mode1.matrix(), mode2.matrix()).eval();
  return {FockBasis::two_mode(mode1.basis().n_max()), m};
}

ModeOperator identity_op(const FockBasis& basis) {
  return {basis, CMatrix::Identity(basis.dimension(), basis.dimension())};
}

ModeOperator embed(const CMatrix& single_mode, const FockBasis& basis, int mode_index) {
  require_mode(basis, mode_index);
  const int n = basis.n_max();
  if (single_mode.rows() != n || single_mode.cols() != n)
    throw std::invalid_argument("embed: single-mode matrix must be n_max x n_max");
  if (basis.n_modes() == 1) return {basis, single_mode};
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix full = mode_index == 0 ? CMatrix(Eigen::kroneckerProduct(single_mode, id))
                                 : CMatrix(Eigen::kroneckerProduct(id, single_mode));
  return {basis, full};
}

ModeOperator annihilation_op(const FockBasis& basis, int mode_index) {
  require_mode(basis, mode_index);
  return embed(ladder(basis.n_max()), basis, mode_index);
}

ModeOperator creation_op(const FockBasis& basis, int mode_index) {
  return adjoint(annihilation_op(basis, mode_index));
}

ModeOperator number_op(const FockBasis& basis, int mode_index) {
  require_mode(basis, mode_index);
  CMatrix n = CMatrix::Zero(basis.n_max(), basis.n_max());
  for (int m = 0; m < basis.n_max(); ++m) n(m, m) = double(m);
  return embed(n, basis, mode_index);
}

ModeOperator adjoint(const ModeOperator& op) { return {op.basis(), op.matrix().adjoint()}; }

ModeOperator compose(const ModeOperator& a, const ModeOperator& b) {
  require_same_basis(a.basis(), b.basis(), "compose");
  return {a.basis(), a.matrix() * b.matrix()};
}

ModeOperator commutator(const ModeOperator& a, const ModeOperator& b) {
  return compose(a, b) - compose(b, a);
}

Complex expectation(const DensityMatrix& rho, const ModeOperator& op) {
  require_same_basis(rho.basis(), op.basis(), "expectation");
  // trace(rho * op) without forming the product
  return (rho.matrix().transpose().cwiseProduct(op.matrix())).sum();
}

Complex expectation(const PureState& psi, const ModeOperator& op) {
  require_same_basis(psi.basis(), op.basis(), "expectation");
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep_mode) {
  const FockBasis& basis = rho.basis();
  if (basis.n_modes() != 2) throw std::invalid_argument("partial_trace: requires a two-mode state");
  require_mode(basis, keep_mode);
  const int n = basis.n_max();
  CMatrix out = CMatrix::Zero(n, n);
  const CMatrix& m = rho.matrix();
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      Complex s = 0.0;
      for (int k = 0; k < n; ++k)
        s += keep_mode == 0 ? m(basis.index(a, k), basis.index(c, k)) : m(basis.index(k, a), basis.index(k, c));
      out(a, c) = s;
    }
  return {FockBasis::single(n), out};
}

double top_level_population(const DensityMatrix& rho, double fraction) {
  const FockBasis& basis = rho.basis();
  const int n = basis.n_max();
  const int top = std::max(1, int(std::ceil(fraction * n)));
  double worst = 0.0;
  for (int mode = 0; mode < basis.n_modes(); ++mode) {
    double pop = 0.0;
    for (Eigen::Index i = 0; i < basis.dimension(); ++i)
      if (basis.level(i, mode) >= n - top) pop += rho.matrix()(i, i).real();
    worst = std::max(worst, pop);
  }
  return worst;
}

int recommended_n_max(double r, double tail) {
  if (r < 0.0) throw std::invalid_argument("recommended_n_max: r must be >= 0");
  const double s = std::sinh(r);
  int n = int(std::ceil(8.0 * s * s + 10.0));
  const double t2 = std::tanh(r) * std::tanh(r);
  if (t2 > 0.0) {
    // population above level n - 1 is tanh^(2n) r
    const int exact = int(std::ceil(std::log(tail) / std::log(t2)));
    n = std::max(n, exact);
  }
  return n;
}

}  // namespace eprsim
