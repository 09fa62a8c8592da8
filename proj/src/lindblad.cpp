#include "eprsim/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#ifdef EPRSIM_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "eprsim/errors.hpp"

namespace eprsim::lindblad {

namespace {

using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

RSparse single_ladder(int n_max) {
  RSparse b(n_max, n_max);
  for (int m = 1; m < n_max; ++m) b.insert(m - 1, m) = std::sqrt(double(m));
  b.makeCompressed();
  return b;
}

RSparse embed_sparse(const RSparse& op, int n_max, int mode) {
  RSparse id(n_max, n_max);
  id.setIdentity();
  RSparse out = mode == 0 ? RSparse(Eigen::kroneckerProduct(op, id)) : RSparse(Eigen::kroneckerProduct(id, op));
  out.makeCompressed();
  return out;
}

RSparse identity(Eigen::Index d) {
  RSparse id(d, d);
  id.setIdentity();
  return id;
}

bool is_identity(const RSparse& m) {
  if (m.nonZeros() != m.rows()) return false;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (RSparse::InnerIterator it(m, k); it; ++it)
      if (it.row() != it.col() || it.value() != 1.0) return false;
  return true;
}

// Minimum eigenvalue of a charge-0 density matrix. Such a matrix is block
// diagonal in d = m1 - m2, so the blocks are diagonalized separately.
double min_eigenvalue_charge0(const DensityMatrix& rho) {
  const FockBasis& basis = rho.basis();
  const int n = basis.n_max();
  double lowest = 1.0;
  for (int d = -(n - 1); d <= n - 1; ++d) {
    std::vector<Eigen::Index> idx;
    for (int m1 = 0; m1 < n; ++m1) {
      const int m2 = m1 - d;
      if (m2 >= 0 && m2 < n) idx.push_back(basis.index(m1, m2));
    }
    CMatrix block(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) block(a, b) = rho.matrix()(idx[a], idx[b]);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(block, Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, es.eigenvalues().minCoeff());
  }
  return lowest;
}

DensityMatrix assemble(const FockBasis& basis, const SectorSpace& space, const double* re, const double* im) {
  CMatrix m = CMatrix::Zero(basis.dimension(), basis.dimension());
  for (Eigen::Index c = 0; c < space.size(); ++c)
    m(space.rows[c], space.cols[c]) = Complex(re[c], im ? im[c] : 0.0);
  return {basis, m};
}

}  // namespace

void LindbladModel::validate() const {
  if (!std::isfinite(gamma) || !(gamma > 0.0)) throw std::invalid_argument("LindbladModel: gamma must be > 0");
  if (!std::isfinite(n_param) || n_param < 0.0) throw std::invalid_argument("LindbladModel: N must be >= 0");
  if (!std::isfinite(heating_rate) || heating_rate < 0.0)
    throw std::invalid_argument("LindbladModel: heating_rate must be >= 0");
  const double bound = std::sqrt(n_param * (n_param + 1.0));
  if (!std::isfinite(m_param) || m_param < 0.0 || m_param > bound * (1.0 + 1e-12) + 1e-15)
    throw std::invalid_argument("LindbladModel: M must satisfy 0 <= M <= sqrt(N(N+1))");
}

LindbladModel LindbladModel::from_nopa(const nopa::NopaParams& p, double gamma, double heating_rate) {
  const auto bath = nopa::effective_n_m(p);
  LindbladModel model{gamma, bath.n, bath.m, heating_rate};
  // M^2 = N(N+1) holds analytically; rounding can push M just above the bound.
  model.m_param = std::min(model.m_param, std::sqrt(model.n_param * (model.n_param + 1.0)));
  model.validate();
  return model;
}

int charge(const FockBasis& basis, Eigen::Index row, Eigen::Index col) {
  return (basis.level(row, 0) - basis.level(row, 1)) - (basis.level(col, 0) - basis.level(col, 1));
}

Superoperator::Superoperator(const LindbladModel& model, const FockBasis& basis) : model_(model), basis_(basis) {
  model.validate();
  if (basis.n_modes() != 2) throw std::invalid_argument("build_superoperator: requires a two-mode basis");

  const int n = basis.n_max();
  const RSparse id = identity(basis.dimension());
  const RSparse b[2] = {embed_sparse(single_ladder(n), n, 0), embed_sparse(single_ladder(n), n, 1)};
  const RSparse bd[2] = {RSparse(b[0].transpose()), RSparse(b[1].transpose())};

  const double down = model.gamma * (model.n_param + 1.0) + model.heating_rate * (kHeatingOccupation + 1.0);
  const double up = model.gamma * model.n_param + model.heating_rate * kHeatingOccupation;
  const double cross = 2.0 * model.gamma * model.m_param;

  auto add = [&](double c, const RSparse& left, const RSparse& right) {
    if (c != 0.0) terms_.push_back({c, left, RowSparse(right), is_identity(left), is_identity(right)});
  };
  for (int j = 0; j < 2; ++j) {
    const RSparse lowered = bd[j] * b[j];
    const RSparse raised = b[j] * bd[j];
    add(2.0 * down, b[j], bd[j]);
    add(-down, lowered, id);
    add(-down, id, lowered);
    add(2.0 * up, bd[j], b[j]);
    add(-up, raised, id);
    add(-up, id, raised);
  }
  const RSparse pair = b[0] * b[1];
  const RSparse pair_d = bd[0] * bd[1];
  add(cross, b[0], b[1]);
  add(cross, b[1], b[0]);
  add(-cross, pair, id);
  add(-cross, id, pair);
  add(cross, bd[0], bd[1]);
  add(cross, bd[1], bd[0]);
  add(-cross, pair_d, id);
  add(-cross, id, pair_d);
}

CMatrix Superoperator::apply(const CMatrix& rho) const {
  if (rho.rows() != basis_.dimension() || rho.cols() != basis_.dimension())
    throw std::invalid_argument("Superoperator::apply: size mismatch");
  const RMatrix re = rho.real();
  const RMatrix im = rho.imag();
  RMatrix out_re = RMatrix::Zero(re.rows(), re.cols());
  RMatrix out_im = RMatrix::Zero(re.rows(), re.cols());
  for (const auto& t : terms_) {
    const bool left_id = t.left_identity;
    const bool right_id = t.right_identity;
    RMatrix a_re = left_id ? re : RMatrix(t.left * re);
    RMatrix a_im = left_id ? im : RMatrix(t.left * im);
    if (!right_id) {
      a_re = (a_re * t.right).eval();
      a_im = (a_im * t.right).eval();
    }
    out_re += t.coeff * a_re;
    out_im += t.coeff * a_im;
  }
  CMatrix out(re.rows(), re.cols());
  out.real() = out_re;
  out.imag() = out_im;
  return out;
}

SectorSpace Superoperator::sector_space(std::span<const int> sectors) const {
  SectorSpace space;
  space.sectors.assign(sectors.begin(), sectors.end());
  std::sort(space.sectors.begin(), space.sectors.end());
  space.sectors.erase(std::unique(space.sectors.begin(), space.sectors.end()), space.sectors.end());
  const std::set<int> wanted(space.sectors.begin(), space.sectors.end());
  const Eigen::Index d = basis_.dimension();
  for (Eigen::Index col = 0; col < d; ++col)
    for (Eigen::Index row = 0; row < d; ++row)
      if (wanted.count(charge(basis_, row, col))) {
        space.rows.push_back(row);
        space.cols.push_back(col);
      }
  return space;
}

RSparse Superoperator::sector_matrix(const SectorSpace& space) const {
  const Eigen::Index d = basis_.dimension();
  std::vector<std::int32_t> position(std::size_t(d * d), -1);
  for (Eigen::Index c = 0; c < space.size(); ++c)
    position[std::size_t(space.rows[c] + space.cols[c] * d)] = std::int32_t(c);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(std::size_t(space.size()) * terms_.size());
  for (Eigen::Index c = 0; c < space.size(); ++c) {
    const Eigen::Index i = space.rows[c];
    const Eigen::Index j = space.cols[c];
    for (const auto& t : terms_)
      for (RSparse::InnerIterator a(t.left, i); a; ++a)
        for (RowSparse::InnerIterator b(t.right, j); b; ++b) {
          const std::int32_t target = position[std::size_t(a.row() + b.col() * d)];
          if (target < 0) throw std::logic_error("sector_matrix: generator leaves the sector space");
          triplets.emplace_back(target, c, t.coeff * a.value() * b.value());
        }
  }
  RSparse out(space.size(), space.size());
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.prune(0.0);
  out.makeCompressed();
  return out;
}

RSparse Superoperator::full_matrix() const {
  const Eigen::Index d = basis_.dimension();
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      for (const auto& t : terms_)
        for (RSparse::InnerIterator a(t.left, i); a; ++a)
          for (RowSparse::InnerIterator b(t.right, j); b; ++b)
            triplets.emplace_back(a.row() + b.col() * d, i + j * d, t.coeff * a.value() * b.value());
  RSparse out(d * d, d * d);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.prune(0.0);
  out.makeCompressed();
  return out;
}

Superoperator build_superoperator(const LindbladModel& model, const FockBasis& basis) {
  return Superoperator(model, basis);
}

double purity(const DensityMatrix& rho) { return rho.matrix().squaredNorm(); }

MomentRecord record_moments(const DensityMatrix& rho) {
  const TwoModeMoments m = two_mode_moments(rho);
  MomentRecord r;
  r.n1 = m.n1;
  r.n2 = m.n2;
  r.b1b2 = m.b1b2;
  r.b1b2dag = m.b1b2dag;
  r.var_sum_q = m.cov(0, 0) + m.cov(2, 2) + 2.0 * m.cov(0, 2);
  r.var_diff_p = m.cov(1, 1) + m.cov(3, 3) - 2.0 * m.cov(1, 3);
  r.purity = purity(rho);
  r.trace = rho.trace().real();
  return r;
}

EvolutionResult evolve(const DensityMatrix& rho0, const LindbladModel& model, std::span<const double> times,
                       const EvolveOptions& options) {
  model.validate();
  if (times.empty()) throw std::invalid_argument("evolve: empty time grid");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("evolve: times must be strictly increasing");
  if (!rho0.is_hermitian() || std::abs(rho0.trace() - 1.0) > tol::kTrace)
    throw std::invalid_argument("evolve: initial state is not a normalized density matrix");

  const Superoperator generator(model, rho0.basis());
  const FockBasis& basis = rho0.basis();
  std::set<int> present;
  for (Eigen::Index col = 0; col < basis.dimension(); ++col)
    for (Eigen::Index row = 0; row < basis.dimension(); ++row)
      if (rho0.matrix()(row, col) != Complex(0.0)) present.insert(charge(basis, row, col));
  const std::vector<int> sectors(present.begin(), present.end());
  const SectorSpace space = generator.sector_space(sectors);
  const RSparse matrix = generator.sector_matrix(space);
  const Eigen::Index size = space.size();

  using State = std::vector<double>;
  State x(std::size_t(2 * size));
  for (Eigen::Index c = 0; c < size; ++c) {
    const Complex v = rho0.matrix()(space.rows[c], space.cols[c]);
    x[std::size_t(c)] = v.real();
    x[std::size_t(size + c)] = v.imag();
  }

  EvolutionResult result;
  const double trace0 = rho0.trace().real();
  auto observe = [&](const State& s, double t) {
    DensityMatrix rho = assemble(basis, space, s.data(), s.data() + size);
    MomentRecord rec = record_moments(rho);
    const double allowed = options.trace_drift_per_gamma_t * std::max(1.0, model.gamma * (t - times.front()));
    const double err = std::abs(rec.trace - trace0);
    result.max_trace_error = std::max(result.max_trace_error, err);
    if (err > allowed) {
      std::ostringstream msg;
      msg << "evolve: trace drifted by " << err << " at t=" << t << " (allowed " << allowed << ")";
      throw NumericalFailure(msg.str());
    }
    result.times.push_back(t);
    result.moments.push_back(rec);
    if (options.keep_states) result.states.push_back(std::move(rho));
  };

  if (times.size() == 1) {
    observe(x, times.front());
    return result;
  }

  auto system = [&](const State& s, State& ds, double) {
    Eigen::Map<const RMatrix> in(s.data(), size, 2);
    Eigen::Map<RMatrix> out(ds.data(), size, 2);
    out.noalias() = matrix * in;
  };

  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol, odeint::runge_kutta_dopri5<State>());
  const double dt0 = 1e-3 / model.gamma;
  try {
    odeint::integrate_times(stepper, system, x, times.begin(), times.end(), dt0, observe,
                            odeint::max_step_checker(10'000'000));
  } catch (const NumericalFailure&) {
    throw;
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "evolve: integrator failed after reaching t=" << (result.times.empty() ? times.front() : result.times.back())
        << " (max trace error " << result.max_trace_error << "): " << e.what();
    throw NumericalFailure(msg.str());
  }
  return result;
}

namespace {

SteadyStateResult finish(const Superoperator& generator, DensityMatrix rho, std::string method, int iterations) {
  rho = rho.normalized();
  SteadyStateResult out{rho, 0.0, std::move(method), iterations, false};
  out.residual = generator.apply(rho.matrix()).norm();
  out.truncation_warning = top_level_population(rho) > 1e-4;
  return out;
}

}  // namespace

SteadyStateResult steady_state_by_integration(const LindbladModel& model, const FockBasis& basis, double gamma_t) {
  const Superoperator generator(model, basis);
  const std::vector<double> times = {0.0, gamma_t / model.gamma};
  EvolveOptions opts;
  opts.keep_states = true;
  const auto run = evolve(DensityMatrix::vacuum(basis), model, times, opts);
  return finish(generator, run.states.back(), "time-integration", 0);
}

SteadyStateResult steady_state(const LindbladModel& model, const FockBasis& basis, const SteadyStateOptions& options) {
  const Superoperator generator(model, basis);
  const int zero[] = {0};
  const SectorSpace space = generator.sector_space(zero);
  const RSparse matrix = generator.sector_matrix(space);

  RSparse shifted = matrix;
  for (Eigen::Index c = 0; c < shifted.rows(); ++c) shifted.coeffRef(c, c) -= options.shift * model.gamma;
  shifted.makeCompressed();

#ifdef EPRSIM_HAVE_UMFPACK
  Eigen::UmfPackLU<RSparse> lu;
#else
  Eigen::SparseLU<RSparse, Eigen::COLAMDOrdering<int>> lu;
#endif
  lu.compute(shifted);

  std::vector<Eigen::Index> diagonal;
  for (Eigen::Index c = 0; c < space.size(); ++c)
    if (space.rows[c] == space.cols[c]) diagonal.push_back(c);

  RVector x = RVector::Zero(space.size());
  for (Eigen::Index c : diagonal) x(c) = 1.0 / double(diagonal.size());

  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  if (lu.info() == Eigen::Success) {
    for (; iterations < options.max_iterations; ++iterations) {
      RVector y = lu.solve(x);
      if (lu.info() != Eigen::Success || !y.allFinite()) break;
      double tr = 0.0;
      for (Eigen::Index c : diagonal) tr += y(c);
      if (!(std::abs(tr) > 0.0)) break;
      x = y / tr;
      const double next = (matrix * x).norm();
      if (next <= options.residual_tol * model.gamma) {
        residual = next;
        converged = true;
        ++iterations;
        // one more solve with the same factors removes the O(shift) admixture
        const RVector z = lu.solve(x);
        double tz = 0.0;
        for (Eigen::Index c : diagonal) tz += z(c);
        if (z.allFinite() && std::abs(tz) > 0.0 && (matrix * (z / tz)).norm() <= residual) {
          x = z / tz;
          ++iterations;
        }
        break;
      }
      // stalled: no improvement over the previous iterate
      if (iterations > 2 && next > 0.5 * residual) {
        residual = std::min(residual, next);
        break;
      }
      residual = next;
    }
  }

  if (converged) {
    auto out = finish(generator, assemble(basis, space, x.data(), nullptr), "inverse-iteration", iterations);
    if (out.residual <= options.residual_tol * model.gamma) return out;
    residual = out.residual;
  }
  if (options.allow_fallback) {
    auto out = steady_state_by_integration(model, basis, options.fallback_gamma_t);
    if (out.residual <= options.residual_tol * model.gamma) return out;
    residual = std::min(residual, out.residual);
  }
  std::ostringstream msg;
  msg << "steady_state: null-space solve did not converge (best residual " << residual << ")";
  throw NumericalFailure(msg.str());
}

double charge0_min_eigenvalue(const DensityMatrix& rho) { return min_eigenvalue_charge0(rho); }

}  // namespace eprsim::lindblad
