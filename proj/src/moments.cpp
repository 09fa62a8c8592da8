#include "eprsim/moments.hpp"

#include <stdexcept>

#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

namespace eprsim {

namespace {

using CSparse = Eigen::SparseMatrix<Complex>;

CSparse ladder_on(int n_max, int mode) {
  CSparse b(n_max, n_max);
  for (int m = 1; m < n_max; ++m) b.insert(m - 1, m) = std::sqrt(double(m));
  CSparse id(n_max, n_max);
  id.setIdentity();
  CSparse out = mode == 0 ? CSparse(Eigen::kroneckerProduct(b, id)) : CSparse(Eigen::kroneckerProduct(id, b));
  out.makeCompressed();
  return out;
}

// Tr(rho X) for sparse X.
Complex trace_product(const CMatrix& rho, const CSparse& x) {
  Complex s = 0.0;
  for (Eigen::Index k = 0; k < x.outerSize(); ++k)
    for (CSparse::InnerIterator it(x, k); it; ++it) s += it.value() * rho(it.col(), it.row());
  return s;
}

}  // namespace

TwoModeMoments two_mode_moments(const DensityMatrix& rho) {
  if (rho.basis().n_modes() != 2) throw std::invalid_argument("two_mode_moments: requires a two-mode state");
  const int n = rho.basis().n_max();
  const CMatrix& m = rho.matrix();
  const Complex i(0.0, 1.0);

  const CSparse b1 = ladder_on(n, 0);
  const CSparse b2 = ladder_on(n, 1);
  const CSparse b1d = b1.adjoint();
  const CSparse b2d = b2.adjoint();

  TwoModeMoments out;
  out.n1 = trace_product(m, CSparse(b1d * b1)).real();
  out.n2 = trace_product(m, CSparse(b2d * b2)).real();
  out.b1b2 = trace_product(m, CSparse(b1 * b2));
  out.b1b2dag = trace_product(m, CSparse(b1 * b2d));

  const std::array<CSparse, 4> r = {CSparse(b1 + b1d), CSparse(-i * (b1 - b1d)), CSparse(b2 + b2d),
                                    CSparse(-i * (b2 - b2d))};
  for (int a = 0; a < 4; ++a) out.mean(a) = trace_product(m, r[a]).real();
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      const CSparse prod = r[a] * r[b];
      // <{Ra, Rb}>/2 = Re <Ra Rb> for Hermitian rho
      const double sym = trace_product(m, prod).real();
      out.cov(a, b) = out.cov(b, a) = sym - out.mean(a) * out.mean(b);
    }
  return out;
}

}  // namespace eprsim
