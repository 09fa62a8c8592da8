#include "eprsim/nopa.hpp"

#include <cmath>
#include <stdexcept>

namespace eprsim::nopa {

NopaParams::NopaParams(double epsilon, double kappa_c) : epsilon_(epsilon), kappa_c_(kappa_c) {
  if (!std::isfinite(epsilon) || !std::isfinite(kappa_c)) throw std::invalid_argument("NopaParams: non-finite rate");
  if (!(kappa_c > 0.0)) throw std::invalid_argument("NopaParams: kappa_c must be > 0");
  if (epsilon < 0.0) throw std::invalid_argument("NopaParams: epsilon must be >= 0");
  if (!(epsilon < kappa_c)) throw std::invalid_argument("NopaParams: epsilon must be below threshold (epsilon < kappa_c)");
}

std::complex<double> transfer_function(const NopaParams& p, double omega) {
  const double k = p.kappa_c();
  const double e = p.epsilon();
  return std::complex<double>(k - e, omega) / std::complex<double>(k + e, -omega);
}

SpectrumTable squeezing_spectra(const NopaParams& p, std::span<const double> omega_grid) {
  SpectrumTable table;
  table.omega.assign(omega_grid.begin(), omega_grid.end());
  table.sum_x_variance.reserve(omega_grid.size());
  table.diff_y_variance.reserve(omega_grid.size());
  for (double w : omega_grid) {
    const double v = std::norm(transfer_function(p, w));
    table.sum_x_variance.push_back(v);
    table.diff_y_variance.push_back(v);
  }
  return table;
}

BathParams effective_n_m(const NopaParams& p) {
  const double k = p.kappa_c();
  const double e = p.epsilon();
  const double d = (k - e) * (k + e);
  const double d2 = d * d;
  return {4.0 * e * e * k * k / d2, 2.0 * k * e * (k * k + e * e) / d2};
}

double squeeze_parameter(const NopaParams& p) {
  // asinh(sqrt N) = ln((k + e)/(k - e)); the log form avoids cancellation near threshold
  return std::log((p.kappa_c() + p.epsilon()) / (p.kappa_c() - p.epsilon()));
}

double epsilon_for_squeezing(double r, double kappa_c) {
  if (r < 0.0) throw std::invalid_argument("epsilon_for_squeezing: r must be >= 0");
  return kappa_c * std::tanh(r / 2.0);
}

}  // namespace eprsim::nopa
