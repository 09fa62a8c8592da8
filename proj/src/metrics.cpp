#include "eprsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eprsim/states.hpp"

namespace eprsim::metrics {

double fidelity(const DensityMatrix& rho, const PureState& target) {
  if (!(rho.basis() == target.basis())) throw std::invalid_argument("fidelity: basis mismatch");
  const CVector& psi = target.amplitudes();
  const double f = psi.dot(rho.matrix() * psi).real();
  return std::clamp(f, 0.0, 1.0);
}

double mean_phonon(const DensityMatrix& rho, int mode_index) {
  const FockBasis& basis = rho.basis();
  if (mode_index < 0 || mode_index >= basis.n_modes()) throw std::out_of_range("mean_phonon: mode index out of range");
  double n = 0.0;
  for (Eigen::Index i = 0; i < basis.dimension(); ++i) n += basis.level(i, mode_index) * rho.matrix()(i, i).real();
  return std::max(n, 0.0);
}

EprCriterion epr_criterion(double var_sum_q, double var_diff_p) {
  if (var_sum_q < 0.0 || var_diff_p < 0.0) throw std::invalid_argument("epr_criterion: variances must be >= 0");
  const double value = var_sum_q + var_diff_p;
  return {value, value < kSeparableBound};
}

void BellSettings::validate() const {
  for (Complex z : {alpha1, alpha2, beta1, beta2}) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::invalid_argument("BellSettings: non-finite displacement");
    if (std::abs(z) > max_magnitude) {
      std::ostringstream msg;
      msg << "BellSettings: displacement magnitude " << std::abs(z) << " exceeds truncation-safety bound "
          << max_magnitude;
      throw std::invalid_argument(msg.str());
    }
  }
}

ParityCorrelation parity_correlation(const DensityMatrix& rho, Complex alpha, Complex beta, double max_magnitude) {
  if (rho.basis().n_modes() != 2) throw std::invalid_argument("parity_correlation: requires a two-mode state");
  BellSettings{alpha, alpha, beta, beta, max_magnitude}.validate();
  const int n = rho.basis().n_max();
  const double e = states::two_mode_expectation(rho, states::displaced_parity(alpha, n),
                                                states::displaced_parity(beta, n))
                       .real();
  return {std::clamp(e, -1.0, 1.0), top_level_population(rho) > states::kTruncationWarnPopulation};
}

double chsh_value(const DensityMatrix& rho, const BellSettings& s) {
  s.validate();
  if (rho.basis().n_modes() != 2) throw std::invalid_argument("chsh_value: requires a two-mode state");
  const int n = rho.basis().n_max();
  const CMatrix a1 = states::displaced_parity(s.alpha1, n);
  const CMatrix a2 = states::displaced_parity(s.alpha2, n);
  const CMatrix b1 = states::displaced_parity(s.beta1, n);
  const CMatrix b2 = states::displaced_parity(s.beta2, n);
  auto e = [&](const CMatrix& x, const CMatrix& y) { return states::two_mode_expectation(rho, x, y).real(); };
  return e(a1, b1) + e(a1, b2) + e(a2, b1) - e(a2, b2);
}

namespace {

// <psi|A x B|psi> with psi reshaped to Psi[a, b]: sum conj(Psi) o (A Psi B^T).
double pure_expectation(const PureState& psi, const CMatrix& a, const CMatrix& b) {
  const int n = psi.basis().n_max();
  // amplitudes are stored with mode 2 fastest, i.e. a row-major n x n block
  const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      psi.amplitudes().data(), n, n);
  const CMatrix applied = a * m * b.transpose();
  return (m.conjugate().cwiseProduct(applied)).sum().real();
}

double pure_top_population(const PureState& psi, double fraction = 0.1) {
  const FockBasis& basis = psi.basis();
  const int n = basis.n_max();
  const int top = std::max(1, int(std::ceil(fraction * n)));
  double worst = 0.0;
  for (int mode = 0; mode < basis.n_modes(); ++mode) {
    double pop = 0.0;
    for (Eigen::Index i = 0; i < basis.dimension(); ++i)
      if (basis.level(i, mode) >= n - top) pop += std::norm(psi.amplitudes()(i));
    worst = std::max(worst, pop);
  }
  return worst;
}

void require_two_mode(const PureState& psi, const char* what) {
  if (psi.basis().n_modes() != 2) throw std::invalid_argument(std::string(what) + ": requires a two-mode state");
}

}  // namespace

ParityCorrelation parity_correlation(const PureState& psi, Complex alpha, Complex beta, double max_magnitude) {
  require_two_mode(psi, "parity_correlation");
  BellSettings{alpha, alpha, beta, beta, max_magnitude}.validate();
  const int n = psi.basis().n_max();
  const double e = pure_expectation(psi, states::displaced_parity(alpha, n), states::displaced_parity(beta, n));
  return {std::clamp(e, -1.0, 1.0), pure_top_population(psi) > states::kTruncationWarnPopulation};
}

double chsh_value(const PureState& psi, const BellSettings& s) {
  s.validate();
  require_two_mode(psi, "chsh_value");
  const int n = psi.basis().n_max();
  const CMatrix a1 = states::displaced_parity(s.alpha1, n);
  const CMatrix a2 = states::displaced_parity(s.alpha2, n);
  const CMatrix b1 = states::displaced_parity(s.beta1, n);
  const CMatrix b2 = states::displaced_parity(s.beta2, n);
  auto e = [&](const CMatrix& x, const CMatrix& y) { return pure_expectation(psi, x, y); };
  return e(a1, b1) + e(a1, b2) + e(a2, b1) - e(a2, b2);
}

double log_negativity(const gaussian::CovarianceState& state) {
  if (state.n_modes() != 2) throw std::invalid_argument("log_negativity: requires a two-mode state");
  if (!state.is_physical()) throw std::invalid_argument("log_negativity: covariance violates the uncertainty relation");
  const RMatrix& s = state.cov();
  const double det_a = s.topLeftCorner(2, 2).determinant();
  const double det_b = s.bottomRightCorner(2, 2).determinant();
  const double det_c = s.topRightCorner(2, 2).determinant();
  // partial transpose flips the sign of det C
  const double delta = det_a + det_b - 2.0 * det_c;
  const double det = s.determinant();
  const double disc = std::max(0.0, delta * delta - 4.0 * det);
  const double nu_minus = std::sqrt(std::max(0.0, (delta - std::sqrt(disc)) / 2.0));
  if (nu_minus >= 1.0) return 0.0;
  return -std::log2(nu_minus);
}

}  // namespace eprsim::metrics
