#pragma once

// Two-mode master equation driven by a correlated (squeezed) bath:
//
//   d rho/dt = sum_j Gamma(N+1) D[b_j] rho + Gamma N D[b_j^dagger] rho
//            + 2 Gamma M (b1 rho b2 + b2 rho b1 - b1 b2 rho - rho b1 b2)
//            + 2 Gamma M (b1^+ rho b2^+ + b2^+ rho b1^+ - b1^+ b2^+ rho - rho b1^+ b2^+)
//
// with D[L] rho = 2 L rho L^dagger - L^dagger L rho - rho L^dagger L. An
// optional heating channel adds heating_rate * [(n_th+1) D[b_j] + n_th D[b_j^dagger]]
// with n_th = kHeatingOccupation on each mode.
//
// The generator maps |m1 m2><n1 n2| only onto elements with the same
// charge k = (m1 - m2) - (n1 - n2), so it is stored and solved per sector.
// All matrix elements are real in the Fock basis.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "eprsim/hilbert.hpp"
#include "eprsim/moments.hpp"
#include "eprsim/nopa.hpp"

namespace eprsim::lindblad {

using RSparse = Eigen::SparseMatrix<double>;

// Thermal occupation of the optional heating channel. Not part of the source
// model; reported as such in command output.
inline constexpr double kHeatingOccupation = 1.0;

struct LindbladModel {
  double gamma = 1.0;
  double n_param = 0.0;
  double m_param = 0.0;
  double heating_rate = 0.0;

  // Throws std::invalid_argument unless gamma > 0, N >= 0, heating >= 0 and
  // 0 <= M <= sqrt(N(N+1)) (up to rounding).
  void validate() const;

  static LindbladModel from_nopa(const nopa::NopaParams& p, double gamma, double heating_rate = 0.0);
};

// Coordinates of one or more charge sectors inside the d x d density matrix.
struct SectorSpace {
  std::vector<int> sectors;
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;

  Eigen::Index size() const { return Eigen::Index(rows.size()); }
};

int charge(const FockBasis& basis, Eigen::Index row, Eigen::Index col);

class Superoperator {
 public:
  Superoperator(const LindbladModel& model, const FockBasis& basis);

  const FockBasis& basis() const { return basis_; }
  const LindbladModel& model() const { return model_; }

  // L(rho), applied term by term.
  CMatrix apply(const CMatrix& rho) const;

  SectorSpace sector_space(std::span<const int> sectors) const;

  // Generator restricted to the coordinates of `space`, in the same order.
  RSparse sector_matrix(const SectorSpace& space) const;

  // Full generator on column-major vec(rho); size dimension^2 squared, so only
  // for small bases.
  RSparse full_matrix() const;

 private:
  struct Term {
    double coeff;
    RSparse left;   // column-major
    Eigen::SparseMatrix<double, Eigen::RowMajor> right;
    bool left_identity;
    bool right_identity;
  };

  LindbladModel model_;
  FockBasis basis_;
  std::vector<Term> terms_;
};

Superoperator build_superoperator(const LindbladModel& model, const FockBasis& basis);

struct MomentRecord {
  double n1 = 0.0;
  double n2 = 0.0;
  Complex b1b2 = 0.0;
  Complex b1b2dag = 0.0;
  double var_sum_q = 0.0;   // Var(Q1 + Q2)
  double var_diff_p = 0.0;  // Var(P1 - P2)
  double purity = 0.0;
  double trace = 0.0;
};

MomentRecord record_moments(const DensityMatrix& rho);

struct EvolutionResult {
  std::vector<double> times;
  std::vector<DensityMatrix> states;  // empty unless keep_states
  std::vector<MomentRecord> moments;
  double max_trace_error = 0.0;
};

struct EvolveOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-13;
  bool keep_states = true;
  // Trace may drift by at most this much per unit of gamma * t.
  double trace_drift_per_gamma_t = 1e-8;
};

// rho0 is the state at times.front(). Throws NumericalFailure if the
// integrator gives up or the trace drifts beyond tolerance.
EvolutionResult evolve(const DensityMatrix& rho0, const LindbladModel& model, std::span<const double> times,
                       const EvolveOptions& options = {});

struct SteadyStateOptions {
  double residual_tol = 1e-8;
  int max_iterations = 30;
  // Shift (in units of gamma) for inverse iteration; sits just right of the
  // zero eigenvalue.
  double shift = 1e-10;
  bool allow_fallback = true;
  double fallback_gamma_t = 20.0;
};

struct SteadyStateResult {
  DensityMatrix rho;
  double residual = 0.0;  // Frobenius norm of L(rho)
  std::string method;     // "inverse-iteration" or "time-integration"
  int iterations = 0;
  bool truncation_warning = false;
};

SteadyStateResult steady_state(const LindbladModel& model, const FockBasis& basis,
                               const SteadyStateOptions& options = {});

// Long-time integration path: evolve the vacuum to gamma * t = gamma_t.
SteadyStateResult steady_state_by_integration(const LindbladModel& model, const FockBasis& basis,
                                              double gamma_t = 20.0);

double purity(const DensityMatrix& rho);

// Smallest eigenvalue of a charge-0 density matrix (block diagonal in m1 - m2).
double charge0_min_eigenvalue(const DensityMatrix& rho);

}  // namespace eprsim::lindblad
