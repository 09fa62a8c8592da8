#pragma once

// Below-threshold nondegenerate parametric amplifier: quadrature transfer
// function of the output fields and the correlated-bath parameters it imposes
// on the driven motional modes.
//
// Quadratures follow X = c + c^dagger, Y = -i(c - c^dagger); vacuum variance 1.

#include <complex>
#include <span>
#include <vector>

namespace eprsim::nopa {

class NopaParams {
 public:
  // Requires 0 <= epsilon < kappa_c; threshold is rejected.
  NopaParams(double epsilon, double kappa_c);

  double epsilon() const { return epsilon_; }
  double kappa_c() const { return kappa_c_; }

 private:
  double epsilon_;
  double kappa_c_;
};

struct SpectrumTable {
  std::vector<double> omega;
  std::vector<double> sum_x_variance;   // Var(X1 + X2) relative to vacuum input
  std::vector<double> diff_y_variance;  // Var(Y1 - Y2) relative to vacuum input
};

struct BathParams {
  double n;  // N
  double m;  // M
};

// T(w) = (kappa_c - eps + i w) / (kappa_c + eps - i w)
std::complex<double> transfer_function(const NopaParams& p, double omega);

SpectrumTable squeezing_spectra(const NopaParams& p, std::span<const double> omega_grid);

BathParams effective_n_m(const NopaParams& p);

// r = asinh(sqrt(N)), so cosh r = sqrt(N + 1) and e^{-r} = (kappa_c - eps)/(kappa_c + eps).
double squeeze_parameter(const NopaParams& p);

// Pump coupling that yields squeeze parameter r at decay rate kappa_c.
double epsilon_for_squeezing(double r, double kappa_c);

}  // namespace eprsim::nopa
