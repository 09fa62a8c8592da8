#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "eprsim/feasibility.hpp"

using namespace eprsim::feasibility;

namespace {

// Every ratio sits exactly at 2 = 6 / 3 when the threshold is 6.
ExperimentParams boundary_params() {
  ExperimentParams p;
  p.delta_big = 2.0;
  p.e_laser = 1.0;
  p.g0 = 1.0;
  p.nu_x = 1.0;
  p.kappa_a = 0.5;
  p.eta_x = 0.5;
  p.gamma_atom = 1.0;
  p.kappa_c = 0.25;
  p.t_decoherence = 16.0;
  return p;
}

// Representative magnitudes in Hz: trap in the tens of MHz, cavity decay a few MHz.
ExperimentParams representative() {
  ExperimentParams p;
  p.nu_x = 2e7;
  p.kappa_a = 2e6;
  p.g0 = 1e8;
  p.gamma_atom = 5e6;
  p.eta_x = 0.05;
  p.delta_big = 5e9;
  p.e_laser = 4e8;  // g0 eta E / Delta = 0.2 kappa_a
  p.kappa_c = 1e8;
  p.t_decoherence = 1e-2;
  return p;
}

int rank(Verdict v) { return v == Verdict::pass ? 2 : v == Verdict::warn ? 1 : 0; }

}  // namespace

TEST_CASE("validation") {
  CHECK_NOTHROW(representative().validate());
  ExperimentParams p = representative();
  p.eta_x = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = representative();
  p.kappa_c = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = representative();
  p.t_decoherence = -1.0;
  CHECK_THROWS_AS(check_all(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(check_all(representative(), -0.5), std::invalid_argument);
  CHECK_THROWS_AS(check_all(representative(), 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("coupling rate") {
  ExperimentParams p = representative();
  p.kappa_a = 1e6;
  p.g0 = 1e8;
  p.eta_x = 0.1;
  p.delta_big = 1e10;
  p.e_laser = 1e8;  // g0 eta E / Delta = 1e5 = 0.1 kappa_a
  CHECK(coupling_rate(p) == doctest::Approx(0.01 * p.kappa_a).epsilon(1e-12));
  const double g = coupling_rate(p);
  p.e_laser *= 2.0;
  CHECK(coupling_rate(p) == doctest::Approx(4.0 * g).epsilon(1e-12));
}

TEST_CASE("cooperativity") {
  ExperimentParams p = representative();
  p.g0 = std::sqrt(70.0 * p.kappa_a * p.gamma_atom);
  CHECK(cooperativity(p) == doctest::Approx(70.0).epsilon(1e-12));
  CHECK(check_all(p, 0.0).c1 == doctest::Approx(70.0).epsilon(1e-12));
  p.g0 = std::sqrt(p.kappa_a * p.gamma_atom);
  CHECK(cooperativity(p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_all(p, 0.0).check("cooperativity").verdict == Verdict::fail);
  const double c = cooperativity(p);
  p.g0 *= 2.0;
  CHECK(cooperativity(p) == doctest::Approx(4.0 * c).epsilon(1e-12));
}

TEST_CASE("classification bands") {
  CHECK(classify(10.0, 10.0) == Verdict::pass);
  CHECK(classify(10.0 / 3.0, 10.0) == Verdict::warn);
  CHECK(classify(3.3, 10.0) == Verdict::fail);
  CHECK(to_string(Verdict::warn) == "warn");
}

TEST_CASE("report lists every check once") {
  const std::vector<std::string> expected = {
      "detuning_vs_drive",     "detuning_vs_coupling", "detuning_vs_trap",   "trap_vs_cavity_decay",
      "cavity_decay_vs_raman", "white_noise",          "lamb_dicke_refined", "decoherence_budget",
      "cooperativity",         "gamma_magnitude"};
  CHECK(check_names() == expected);
  for (double r : {0.0, 1.0}) {
    const FeasibilityReport rep = check_all(representative(), r);
    std::vector<std::string> names;
    for (const auto& c : rep.checks) names.push_back(c.name);
    CHECK(names == expected);
  }
  CHECK_THROWS_AS(check_all(representative(), 0.0).check("nope"), std::out_of_range);
}

TEST_CASE("refined Lamb-Dicke check uses cosh r") {
  ExperimentParams p = representative();
  const double r = 0.8;
  p.eta_x = 0.05 / std::cosh(r);
  const Check c = check_all(p, r).check("lamb_dicke_refined");
  CHECK(c.ratio == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(c.verdict == Verdict::pass);
  // the same eta without squeezing leaves more margin
  CHECK(check_all(p, 0.0).check("lamb_dicke_refined").ratio > c.ratio);
}

TEST_CASE("cavity decay comparable to the trap frequency fails the hierarchy") {
  ExperimentParams p = representative();
  p.kappa_a = p.nu_x;
  CHECK(check_all(p, 0.0).check("trap_vs_cavity_decay").verdict == Verdict::fail);
}

TEST_CASE("all ratios at the warn boundary") {
  const FeasibilityReport rep = check_all(boundary_params(), 0.0, 6.0);
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CHECK(c.verdict == Verdict::warn);
    if (c.name != "gamma_magnitude") CHECK(c.ratio == doctest::Approx(2.0).epsilon(1e-15));
  }
}

TEST_CASE("gamma band") {
  const FeasibilityReport rep = check_all(representative(), 1.0);
  CHECK(rep.gamma_eff == doctest::Approx(0.04 * 2e6).epsilon(1e-12));
  CHECK(rep.gamma_eff >= kGammaBandLow);
  CHECK(rep.gamma_eff < kGammaBandHigh);
  CHECK(rep.check("gamma_magnitude").verdict == Verdict::pass);
  ExperimentParams slow = representative();
  slow.e_laser /= 100.0;
  CHECK(check_all(slow, 1.0).check("gamma_magnitude").verdict == Verdict::warn);
}

TEST_CASE("larger detuning never worsens the detuning-limited checks") {
  // decoherence_budget and gamma_magnitude depend on Gamma, which falls as 1/Delta^2
  const std::set<std::string> excluded = {"decoherence_budget", "gamma_magnitude"};
  ExperimentParams p = boundary_params();
  FeasibilityReport prev = check_all(p, 0.3, 6.0);
  for (int i = 0; i < 12; ++i) {
    p.delta_big *= 1.7;
    const FeasibilityReport next = check_all(p, 0.3, 6.0);
    for (std::size_t k = 0; k < next.checks.size(); ++k) {
      if (excluded.count(next.checks[k].name)) continue;
      CAPTURE(next.checks[k].name);
      CHECK(rank(next.checks[k].verdict) >= rank(prev.checks[k].verdict));
    }
    prev = next;
  }
}

TEST_CASE("rate scaling") {
  const ExperimentParams p = representative();
  for (double lambda : {0.01, 3.0, 1e3}) {
    ExperimentParams q = p;
    for (double* x : {&q.g0, &q.kappa_a, &q.gamma_atom, &q.delta_big, &q.e_laser, &q.nu_x, &q.kappa_c}) *x *= lambda;
    CHECK(coupling_rate(q) == doctest::Approx(lambda * coupling_rate(p)).epsilon(1e-12));
    CHECK(cooperativity(q) == doctest::Approx(cooperativity(p)).epsilon(1e-12));
  }
}

TEST_CASE("trap y/z axes and laser phase do not enter any check") {
  ExperimentParams p = representative();
  const FeasibilityReport a = check_all(p, 0.5);
  p.nu_y = 1.0;
  p.nu_z = 3e9;
  p.phi_laser = 2.0;
  const FeasibilityReport b = check_all(p, 0.5);
  for (std::size_t k = 0; k < a.checks.size(); ++k) CHECK(a.checks[k].ratio == b.checks[k].ratio);
}
