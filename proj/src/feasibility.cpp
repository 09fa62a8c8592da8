#include "eprsim/feasibility.hpp"

#include <cmath>
#include <stdexcept>

namespace eprsim::feasibility {

void ExperimentParams::validate() const {
  const std::pair<const char*, double> rates[] = {
      {"g0", g0},           {"kappa_a", kappa_a}, {"gamma_atom", gamma_atom}, {"delta_big", delta_big},
      {"e_laser", e_laser}, {"nu_x", nu_x},       {"kappa_c", kappa_c},       {"t_decoherence", t_decoherence}};
  for (const auto& [name, value] : rates)
    if (!std::isfinite(value) || !(value > 0.0))
      throw std::invalid_argument(std::string("ExperimentParams: ") + name + " must be > 0");
  if (!(eta_x > 0.0 && eta_x < 1.0)) throw std::invalid_argument("ExperimentParams: eta_x must lie in (0, 1)");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::warn: return "warn";
    case Verdict::fail: return "fail";
  }
  return "fail";
}

const Check& FeasibilityReport::check(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("FeasibilityReport: no check named " + std::string(name));
}

double coupling_rate(const ExperimentParams& p) {
  const double x = p.g0 * p.eta_x * p.e_laser / p.delta_big;
  return x * x / p.kappa_a;
}

double cooperativity(const ExperimentParams& p) { return p.g0 * p.g0 / (p.kappa_a * p.gamma_atom); }

Verdict classify(double ratio, double threshold) {
  if (ratio >= threshold) return Verdict::pass;
  if (ratio >= threshold / 3.0) return Verdict::warn;
  return Verdict::fail;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "detuning_vs_drive",       "detuning_vs_coupling", "detuning_vs_trap",  "trap_vs_cavity_decay",
      "cavity_decay_vs_raman",   "white_noise",          "lamb_dicke_refined", "decoherence_budget",
      "cooperativity",           "gamma_magnitude"};
  return names;
}

FeasibilityReport check_all(const ExperimentParams& p, double r, double ratio_threshold) {
  p.validate();
  if (!(r >= 0.0)) throw std::invalid_argument("check_all: r must be >= 0");
  if (!(ratio_threshold > 0.0)) throw std::invalid_argument("check_all: ratio threshold must be > 0");

  FeasibilityReport report;
  report.gamma_eff = coupling_rate(p);
  report.c1 = cooperativity(p);
  const double raman = p.g0 * p.eta_x * p.e_laser / p.delta_big;

  auto ratio_check = [&](const char* name, double ratio) {
    report.checks.push_back({name, ratio, ratio_threshold, classify(ratio, ratio_threshold)});
  };
  ratio_check("detuning_vs_drive", p.delta_big / p.e_laser);
  ratio_check("detuning_vs_coupling", p.delta_big / p.g0);
  // covers Delta >> delta too, since delta = nu_x
  ratio_check("detuning_vs_trap", p.delta_big / p.nu_x);
  ratio_check("trap_vs_cavity_decay", p.nu_x / p.kappa_a);
  ratio_check("cavity_decay_vs_raman", p.kappa_a / raman);
  ratio_check("white_noise", p.kappa_c / report.gamma_eff);
  ratio_check("lamb_dicke_refined", 1.0 / (p.eta_x * std::cosh(r)));
  ratio_check("decoherence_budget", p.t_decoherence * report.gamma_eff);
  ratio_check("cooperativity", report.c1);

  const bool in_band = report.gamma_eff >= kGammaBandLow && report.gamma_eff < kGammaBandHigh;
  report.checks.push_back({"gamma_magnitude", report.gamma_eff, kGammaBandLow, in_band ? Verdict::pass : Verdict::warn});
  return report;
}

}  // namespace eprsim::feasibility
