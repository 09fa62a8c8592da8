#include "eprsim/linalg.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace eprsim::linalg {

CMatrix expm_antihermitian(const CMatrix& generator) {
  if (generator.rows() != generator.cols()) throw std::invalid_argument("expm_antihermitian: matrix not square");
  const Complex i(0.0, 1.0);
  CMatrix h = i * generator;
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  // G = -i H, so exp(G) = V exp(-i lambda) V^dagger
  const CVector phases = (-i * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

RMatrix expm(const RMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix not square");
  return a.exp();
}

}  // namespace eprsim::linalg
