#include "eprsim/gaussian.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "eprsim/errors.hpp"
#include "eprsim/linalg.hpp"

namespace eprsim::gaussian {

namespace {

constexpr double kLyapunovResidual = 1e-10;

void require_square(const RMatrix& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

CovarianceState::CovarianceState(RVector mean, RMatrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() == 0 || mean_.size() % 2 != 0) throw std::invalid_argument("CovarianceState: mean length must be 2n");
  require_square(cov_, mean_.size(), "CovarianceState");
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("CovarianceState: covariance not symmetric");
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
}

CovarianceState CovarianceState::vacuum(int n_modes) {
  return {RVector::Zero(2 * n_modes), RMatrix::Identity(2 * n_modes, 2 * n_modes)};
}

CovarianceState CovarianceState::from_moments(const TwoModeMoments& m) { return {m.mean, m.cov}; }

double CovarianceState::physicality_margin() const {
  const CMatrix h = cov_.cast<Complex>() + Complex(0.0, 1.0) * symplectic_form(n_modes()).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CovarianceState CovarianceState::reduced(std::initializer_list<int> modes) const {
  const Eigen::Index n = Eigen::Index(modes.size());
  RVector mean(2 * n);
  RMatrix cov(2 * n, 2 * n);
  std::vector<int> idx;
  for (int m : modes) {
    if (m < 0 || m >= n_modes()) throw std::out_of_range("CovarianceState::reduced: mode out of range");
    idx.push_back(2 * m);
    idx.push_back(2 * m + 1);
  }
  for (Eigen::Index a = 0; a < 2 * n; ++a) {
    mean(a) = mean_(idx[a]);
    for (Eigen::Index b = 0; b < 2 * n; ++b) cov(a, b) = cov_(idx[a], idx[b]);
  }
  return {mean, cov};
}

RMatrix symplectic_form(int n_modes) {
  RMatrix omega = RMatrix::Zero(2 * n_modes, 2 * n_modes);
  for (int j = 0; j < n_modes; ++j) {
    omega(2 * j, 2 * j + 1) = 1.0;
    omega(2 * j + 1, 2 * j) = -1.0;
  }
  return omega;
}

DriftDiffusion model_from_lindblad(const lindblad::LindbladModel& model) {
  model.validate();
  const double g = model.gamma;
  const double h = model.heating_rate;
  DriftDiffusion dd;
  dd.drift = -(g + h) * RMatrix::Identity(4, 4);
  // Balance of the source bath (occupation N, correlation -M in <b1 b2>) plus
  // a thermal bath of occupation n_th at the heating rate.
  RMatrix d = RMatrix::Zero(4, 4);
  const double local = 2.0 * g * (1.0 + 2.0 * model.n_param) + 2.0 * h * (1.0 + 2.0 * lindblad::kHeatingOccupation);
  for (int i = 0; i < 4; ++i) d(i, i) = local;
  d(0, 2) = d(2, 0) = 2.0 * g * (-2.0 * model.m_param);
  d(1, 3) = d(3, 1) = 2.0 * g * (2.0 * model.m_param);
  dd.diffusion = d;
  return dd;
}

CovarianceState steady_covariance(const DriftDiffusion& dd) {
  const Eigen::Index n = dd.drift.rows();
  require_square(dd.drift, n, "steady_covariance");
  require_square(dd.diffusion, n, "steady_covariance");

  Eigen::EigenSolver<RMatrix> es(dd.drift, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> ev = es.eigenvalues()(i);
    if (!(ev.real() < 0.0)) {
      std::ostringstream msg;
      msg << "steady_covariance: drift is not Hurwitz (eigenvalue " << ev.real() << (ev.imag() < 0 ? " - " : " + ")
          << std::abs(ev.imag()) << "i)";
      throw NumericalFailure(msg.str());
    }
  }

  // (I x A + A x I) vec(Sigma) = -vec(D), column-major vec
  const RMatrix id = RMatrix::Identity(n, n);
  RMatrix big = RMatrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      big.block(i * n, j * n, n, n) += id(i, j) * dd.drift;
      big.block(i * n, j * n, n, n) += dd.drift(i, j) * id;
    }
  const RVector rhs = -Eigen::Map<const RVector>(dd.diffusion.data(), n * n);
  const RVector sol = big.fullPivLu().solve(rhs);
  RMatrix sigma = Eigen::Map<const RMatrix>(sol.data(), n, n);
  sigma = 0.5 * (sigma + sigma.transpose()).eval();

  const double residual = (dd.drift * sigma + sigma * dd.drift.transpose() + dd.diffusion).norm();
  if (residual > kLyapunovResidual * std::max(1.0, dd.diffusion.norm())) {
    std::ostringstream msg;
    msg << "steady_covariance: Lyapunov residual " << residual << " above tolerance";
    throw NumericalFailure(msg.str());
  }
  return {RVector::Zero(n), sigma};
}

CovarianceState evolve_covariance(const CovarianceState& state, const DriftDiffusion& dd, double t) {
  if (t < 0.0) throw std::invalid_argument("evolve_covariance: t must be >= 0");
  const Eigen::Index n = dd.drift.rows();
  require_square(dd.drift, n, "evolve_covariance");
  require_square(state.cov(), n, "evolve_covariance");
  if (t == 0.0) return state;

  // The Van Loan block holds exp(-A h), so keep |A| h <= 1 and double up to t.
  const double norm = dd.drift.cwiseAbs().colwise().sum().maxCoeff();
  const int doublings = norm * t > 1.0 ? int(std::ceil(std::log2(norm * t))) : 0;
  const double h = std::ldexp(t, -doublings);

  // Van Loan: exp([[-A, D], [0, A^T]] h) = [[., F12], [0, F22]], with
  // F22 = exp(A^T h) and int_0^h e^{As} D e^{A^T s} ds = F22^T F12.
  RMatrix block = RMatrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -dd.drift;
  block.topRightCorner(n, n) = dd.diffusion;
  block.bottomRightCorner(n, n) = dd.drift.transpose();
  const RMatrix e = linalg::expm(block * h);
  RMatrix phi = e.bottomRightCorner(n, n).transpose();
  RMatrix noise = phi * e.topRightCorner(n, n);
  for (int i = 0; i < doublings; ++i) {
    noise = (phi * noise * phi.transpose() + noise).eval();
    phi = (phi * phi).eval();
  }

  RMatrix cov = phi * state.cov() * phi.transpose() + noise;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {phi * state.mean(), cov};
}

DriftDiffusion cascade_model(const nopa::NopaParams& nopa, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("cascade_model: gamma must be > 0");
  const double k = nopa.kappa_c();
  const double e = nopa.epsilon();
  const double link = std::sqrt(2.0 * k * 2.0 * gamma);

  // index layout: c1 (0,1), c2 (2,3), b1 (4,5), b2 (6,7)
  RMatrix a = RMatrix::Zero(8, 8);
  for (int i = 0; i < 4; ++i) a(i, i) = -k;
  // dX1 = -k X1 - e X2, dY1 = -k Y1 + e Y2 (and 1 <-> 2)
  a(0, 2) = a(2, 0) = -e;
  a(1, 3) = a(3, 1) = e;
  for (int i = 4; i < 8; ++i) a(i, i) = -gamma;
  // b_j driven by c_out^j = sqrt(2k) c_j - c_in^j
  for (int i = 0; i < 4; ++i) a(4 + i, i) = link;

  // Vacuum inputs enter c with weight sqrt(2k) and b with weight -sqrt(2 gamma).
  RMatrix noise = RMatrix::Zero(8, 4);
  for (int i = 0; i < 4; ++i) {
    noise(i, i) = std::sqrt(2.0 * k);
    noise(4 + i, i) = -std::sqrt(2.0 * gamma);
  }
  return {a, noise * noise.transpose()};
}

double collective_mode_map(int k_atoms, double gamma) {
  if (k_atoms < 1) throw std::invalid_argument("collective_mode_map: K must be >= 1");
  return double(k_atoms) * gamma;
}

EprVariances epr_variances(const CovarianceState& state) {
  if (state.n_modes() != 2) throw std::invalid_argument("epr_variances: requires a two-mode state");
  const RMatrix& s = state.cov();
  return {s(0, 0) + s(2, 2) + 2.0 * s(0, 2), s(1, 1) + s(3, 3) - 2.0 * s(1, 3)};
}

}  // namespace eprsim::gaussian
