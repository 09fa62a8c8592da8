#include "eprsim/states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eprsim/linalg.hpp"

namespace eprsim::states {

namespace {

CMatrix single_ladder(int n_max) {
  CMatrix b = CMatrix::Zero(n_max, n_max);
  for (int m = 1; m < n_max; ++m) b(m - 1, m) = std::sqrt(double(m));
  return b;
}

// Generalized Laguerre L_n^(k)(x) by upward recurrence in extended precision.
long double laguerre(int n, int k, long double x) {
  long double prev = 1.0L;
  if (n == 0) return prev;
  long double cur = 1.0L + k - x;
  for (int j = 1; j < n; ++j) {
    const long double next = ((2.0L * j + 1.0L + k - x) * cur - (j + k) * prev) / (j + 1.0L);
    prev = cur;
    cur = next;
  }
  return cur;
}

// <m|D(beta)|n> of the untruncated displacement operator.
Complex displacement_element(Complex beta, int m, int n) {
  const long double x = std::norm(std::complex<long double>(beta.real(), beta.imag()));
  const int lo = std::min(m, n);
  const int k = std::abs(m - n);
  long double log_mag = 0.5L * (std::lgamma((long double)lo + 1) - std::lgamma((long double)lo + k + 1)) - 0.5L * x;
  if (k > 0) {
    if (x == 0.0L) return 0.0;
    log_mag += 0.5L * k * std::log(x);
  }
  const long double value = std::exp(log_mag) * laguerre(lo, k, x);
  // phase: beta^k / |beta|^k for m >= n, (-beta^*)^k / |beta|^k otherwise
  Complex phase = 1.0;
  if (k > 0) {
    const Complex unit = beta / std::abs(beta);
    phase = m >= n ? std::pow(unit, k) : std::pow(-std::conj(unit), k);
  }
  return phase * double(value);
}

}  // namespace

TmssSpec::TmssSpec(double r_) : r(r_) {
  if (!(r_ >= 0.0) || !std::isfinite(r_)) throw std::invalid_argument("TmssSpec: r must be finite and >= 0");
}

double tmss_amplitude(const TmssSpec& spec, int m) {
  return std::pow(-std::tanh(spec.r), m) / std::cosh(spec.r);
}

PureState tmss_fock(const TmssSpec& spec, const FockBasis& basis) {
  if (basis.n_modes() != 2) throw std::invalid_argument("tmss_fock: requires a two-mode basis");
  CVector v = CVector::Zero(basis.dimension());
  for (int m = 0; m < basis.n_max(); ++m) v(basis.index(m, m)) = tmss_amplitude(spec, m);
  return PureState(basis, v).normalized();
}

ModeOperator squeeze_unitary(const TmssSpec& spec, const FockBasis& basis) {
  if (basis.n_modes() != 2) throw std::invalid_argument("squeeze_unitary: requires a two-mode basis");
  const CMatrix b1 = annihilation_op(basis, 0).matrix();
  const CMatrix b2 = annihilation_op(basis, 1).matrix();
  const CMatrix pair = b1 * b2;
  const CMatrix generator = spec.r * (pair - pair.adjoint());
  return {basis, linalg::expm_antihermitian(generator)};
}

ModeOperator displacement_op(Complex alpha, const FockBasis& basis, int mode_index) {
  const CMatrix b = single_ladder(basis.n_max());
  const CMatrix generator = alpha * b.adjoint() - std::conj(alpha) * b;
  return embed(linalg::expm_antihermitian(generator), basis, mode_index);
}

ModeOperator parity_op(const FockBasis& basis, int mode_index) {
  CMatrix p = CMatrix::Zero(basis.n_max(), basis.n_max());
  for (int m = 0; m < basis.n_max(); ++m) p(m, m) = (m % 2 == 0) ? 1.0 : -1.0;
  return embed(p, basis, mode_index);
}

CMatrix displaced_parity(Complex alpha, int n_max) {
  // D(a) Pi D(a)^dagger = D(2a) Pi
  const Complex beta = 2.0 * alpha;
  CMatrix out(n_max, n_max);
  for (int n = 0; n < n_max; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    for (int m = 0; m < n_max; ++m) out(m, n) = sign * displacement_element(beta, m, n);
  }
  return out;
}

Complex two_mode_expectation(const DensityMatrix& rho, const CMatrix& op1, const CMatrix& op2) {
  const FockBasis& basis = rho.basis();
  if (basis.n_modes() != 2) throw std::invalid_argument("two_mode_expectation: requires a two-mode state");
  const int n = basis.n_max();
  if (op1.rows() != n || op1.cols() != n || op2.rows() != n || op2.cols() != n)
    throw std::invalid_argument("two_mode_expectation: operator size mismatch");
  // Tr[rho (A x B)] = sum rho[(a,b),(c,d)] A[c,a] B[d,b]
  const CMatrix& r = rho.matrix();
  Complex total = 0.0;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const Complex ac = op1(c, a);
      if (ac == Complex(0.0)) continue;
      Complex inner = 0.0;
      const auto block = r.block(Eigen::Index(a) * n, Eigen::Index(c) * n, n, n);
      inner = block.cwiseProduct(op2.transpose()).sum();
      total += ac * inner;
    }
  return total;
}

double wigner_analytic(const TmssSpec& spec, double q1, double p1, double q2, double p2) {
  const double e2r = std::exp(2.0 * spec.r);
  const double squeezed = (q1 + q2) * (q1 + q2) + (p1 - p2) * (p1 - p2);
  const double anti = (q1 - q2) * (q1 - q2) + (p1 + p2) * (p1 + p2);
  return 4.0 / (std::numbers::pi * std::numbers::pi) * std::exp(-squeezed * e2r) * std::exp(-anti / e2r);
}

WignerGrid WignerGrid::uniform(double lo, double hi, std::size_t points) {
  std::vector<double> axis(points);
  for (std::size_t i = 0; i < points; ++i)
    axis[i] = points == 1 ? lo : lo + (hi - lo) * double(i) / double(points - 1);
  WignerGrid g;
  g.q1 = g.p1 = g.q2 = g.p2 = axis;
  return g;
}

WignerGrid wigner_analytic_grid(const TmssSpec& spec, WignerGrid grid) {
  grid.values.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.q1.size(); ++i)
    for (std::size_t j = 0; j < grid.p1.size(); ++j)
      for (std::size_t k = 0; k < grid.q2.size(); ++k)
        for (std::size_t l = 0; l < grid.p2.size(); ++l)
          grid.values[grid.flat_index(i, j, k, l)] =
              wigner_analytic(spec, grid.q1[i], grid.p1[j], grid.q2[k], grid.p2[l]);
  return grid;
}

WignerGrid wigner_from_density(const DensityMatrix& rho, WignerGrid grid) {
  if (rho.basis().n_modes() != 2) throw std::invalid_argument("wigner_from_density: requires a two-mode state");
  const int n = rho.basis().n_max();
  const double norm = 4.0 / (std::numbers::pi * std::numbers::pi);
  grid.values.assign(grid.size(), 0.0);
  grid.truncation_warning = top_level_population(rho) > kTruncationWarnPopulation;

  std::vector<CMatrix> mode2;
  mode2.reserve(grid.q2.size() * grid.p2.size());
  for (double q : grid.q2)
    for (double p : grid.p2) mode2.push_back(displaced_parity({q, p}, n));

  for (std::size_t i = 0; i < grid.q1.size(); ++i)
    for (std::size_t j = 0; j < grid.p1.size(); ++j) {
      const CMatrix p1 = displaced_parity({grid.q1[i], grid.p1[j]}, n);
      for (std::size_t k = 0; k < grid.q2.size(); ++k)
        for (std::size_t l = 0; l < grid.p2.size(); ++l)
          grid.values[grid.flat_index(i, j, k, l)] =
              norm * two_mode_expectation(rho, p1, mode2[k * grid.p2.size() + l]).real();
    }
  return grid;
}

}  // namespace eprsim::states
