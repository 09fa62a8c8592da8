#pragma once

// Validity conditions for the adiabatically eliminated atom-cavity coupling
// and the motional-state budget. Every "much greater than" is quantified by a
// ratio compared against a configurable threshold:
//   pass  if ratio >= threshold
//   warn  if ratio >= threshold / 3
//   fail  otherwise

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eprsim::feasibility {

// All rates share one unit (the command line uses Hz); t_decoherence is in
// the reciprocal unit.
struct ExperimentParams {
  double g0 = 0.0;
  double kappa_a = 0.0;
  double gamma_atom = 0.0;
  double delta_big = 0.0;
  double eta_x = 0.0;
  double e_laser = 0.0;
  double nu_x = 0.0;
  double kappa_c = 0.0;
  double t_decoherence = 0.0;
  // accepted but unused by any check
  std::optional<double> nu_y, nu_z, phi_laser;

  void validate() const;
  // Cavity-laser detuning fixed by the resonance condition delta = nu_x.
  double delta_cavity() const { return nu_x; }
};

enum class Verdict { pass, warn, fail };

std::string_view to_string(Verdict v);

struct Check {
  std::string name;
  double ratio;
  double threshold;
  Verdict verdict;
};

struct FeasibilityReport {
  double gamma_eff;
  double c1;
  std::vector<Check> checks;

  const Check& check(std::string_view name) const;
};

// Gamma = (g0 eta_x E_L / Delta)^2 / kappa_a
double coupling_rate(const ExperimentParams& p);

// C1 = g0^2 / (kappa_a gamma)
double cooperativity(const ExperimentParams& p);

Verdict classify(double ratio, double threshold);

// Band in which the effective rate is expected to land: [1e4, 1e6) in the
// rate unit (tens to hundreds of kHz). Outside the band is only a warning.
inline constexpr double kGammaBandLow = 1e4;
inline constexpr double kGammaBandHigh = 1e6;

// Names of the checks, in report order.
const std::vector<std::string>& check_names();

FeasibilityReport check_all(const ExperimentParams& p, double r, double ratio_threshold = 10.0);

}  // namespace eprsim::feasibility
