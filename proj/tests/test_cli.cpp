#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "eprsim/cli/app.hpp"
#include "eprsim/cli/commands.hpp"
#include "eprsim/cli/config.hpp"
#include "eprsim/cli/csv.hpp"
#include "eprsim/errors.hpp"

using namespace eprsim::cli;
using nlohmann::json;

namespace {

constexpr double kPeak = 4.0 / (std::numbers::pi * std::numbers::pi);

json doc(json body) {
  body["schema_version"] = kSchemaVersion;
  return body;
}

CommandOutput run(std::string_view verb, const json& body, int workers = 1) {
  RunOptions opt;
  opt.workers = workers;
  return run_command(verb, doc(body), opt);
}

std::vector<std::vector<double>> rows(const std::string& csv) {
  std::vector<std::vector<double>> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    out.push_back(row);
  }
  return out;
}

std::string header(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

std::string field_of(std::string_view verb, const json& body) {
  try {
    run(verb, body);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("eprsim_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

int run_binary(const std::string& args) {
  const std::string cmd = std::string(EPRSIM_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("float formatting round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CsvWriter w{"a", "b"};
  w.row({1.0, -0.5});
  CHECK(w.str() == "a,b\n1,-0.5\n");
  CHECK_THROWS_AS(w.row({1.0}), std::logic_error);
}

TEST_CASE("config documents") {
  CHECK_NOTHROW(ConfigView::parse_document(R"({"schema_version": 1})"));
  CHECK_THROWS_AS(ConfigView::parse_document("{"), ConfigError);
  CHECK_THROWS_AS(ConfigView::parse_document("[1]"), ConfigError);
  CHECK_THROWS_AS(ConfigView::parse_document(R"({"schema_version": 2})"), ConfigError);
  CHECK_THROWS_AS(ConfigView::parse_document(R"({"nopa": {}})"), ConfigError);
  CHECK_THROWS_AS(ConfigView::parse_document(R"({"schema_version": 1, "seed": "x"})"), ConfigError);
  CHECK_THROWS_AS(run_command("nopa-spectrum", json{{"nopa", {{"epsilon", 0.1}}}}, {}), ConfigError);
  CHECK_THROWS_AS(run("no-such-command", json::object()), ConfigError);
  RunOptions bad;
  bad.workers = 0;
  CHECK_THROWS_AS(run_command("nopa-spectrum", doc({{"nopa", {{"epsilon", 0.1}}}}), bad), ConfigError);
}

TEST_CASE("nopa-spectrum") {
  const CommandOutput flat = run("nopa-spectrum", {{"nopa", {{"epsilon", 0.0}}}, {"spectrum", {{"min", -2}, {"max", 2}, {"points", 9}}}});
  CHECK(header(flat.primary) == "omega_over_kappa,sum_x_var,diff_y_var");
  for (const auto& r : rows(flat.primary)) {
    CHECK(r[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r[2] == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto half = rows(run("nopa-spectrum", {{"nopa", {{"epsilon", 0.5}}}, {"spectrum", {{"min", -1}, {"max", 1}, {"points", 3}}}}).primary);
  CHECK(half[1][0] == 0.0);
  CHECK(half[1][1] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

  CHECK(field_of("nopa-spectrum", {{"nopa", {{"epsilon", 1.0}}}}) == "nopa.epsilon");
  CHECK(field_of("nopa-spectrum", {{"nopa", {{"epsilon", "half"}}}}) == "nopa.epsilon");
  CHECK(field_of("nopa-spectrum", json::object()) == "nopa");
  CHECK(field_of("nopa-spectrum", {{"nopa", {{"epsilon", 0.1}}}, {"spectrum", {{"points", -1}}}}) == "spectrum.points");
}

TEST_CASE("steady-state") {
  const json vac = json::parse(run("steady-state", {{"model", {{"n", 0}, {"m", 0}}}, {"n_max", 6}}).primary);
  CHECK(vac["purity"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vac["mean_phonons"][0].get<double>() < 1e-12);
  CHECK(vac["epr_criterion"]["value"].get<double>() == doctest::Approx(4.0).epsilon(1e-8));

  const json sq = json::parse(
      run("steady-state", {{"nopa", {{"epsilon", 0.3}}}, {"model", {{"from_nopa", true}, {"gamma", 0.1}}}, {"n_max", 18}}).primary);
  CHECK(sq["fidelity_to_tmss"].get<double>() > 0.999);
  CHECK(sq["epr_criterion"]["entangled"].get<bool>());
  CHECK(sq["epr_variances"]["var_sum_q"].get<double>() ==
        doctest::Approx(sq["gaussian"]["var_sum_q"].get<double>()).epsilon(1e-5));
  CHECK_FALSE(sq["model"].contains("heating_occupation"));

  const json heated = json::parse(run("steady-state", {{"model", {{"n", 0.2}, {"m", 0.1}, {"heating_rate", 0.1}}}, {"n_max", 14}}).primary);
  CHECK(heated["model"]["heating_occupation"].get<double>() == 1.0);
  CHECK(heated["purity"].get<double>() < 1.0);

  CHECK(field_of("steady-state", {{"model", {{"n", 0.5}, {"m", 2.0}}}}) == "model");
  CHECK(field_of("steady-state", {{"model", {{"from_nopa", true}}}}) == "nopa");
  CHECK(field_of("steady-state", {{"model", {{"n", 0.0}, {"m", 0.0}, {"gamma", -1}}}}) == "model.gamma");
  CHECK(field_of("steady-state", {{"model", {{"n", 0.0}, {"m", 0.0}}}, {"n_max", 1}}) == "n_max");
  CHECK(field_of("steady-state", {{"model", {{"n", 0.0}, {"m", 0.0}}}, {"output", {{"density_csv", true}}}}) ==
        "output.density_csv");

  RunOptions with_out;
  with_out.has_out_path = true;
  const CommandOutput dumped =
      run_command("steady-state", doc({{"model", {{"n", 0}, {"m", 0}}}, {"n_max", 3}, {"output", {{"density_csv", true}}}}), with_out);
  REQUIRE(dumped.sidecars.size() == 1);
  CHECK(dumped.sidecars[0].suffix == ".density.csv");
  CHECK(header(dumped.sidecars[0].content) == "row,col,re,im");
}

TEST_CASE("n-max override") {
  RunOptions opt;
  opt.n_max_override = 5;
  const json j = json::parse(run_command("steady-state", doc({{"model", {{"n", 0}, {"m", 0}}}, {"n_max", 9}}), opt).primary);
  CHECK(j["n_max"] == 5);
  opt.n_max_override = 1;
  CHECK_THROWS_AS(run_command("steady-state", doc({{"model", {{"n", 0}, {"m", 0}}}}), opt), ConfigError);
}

TEST_CASE("evolve") {
  const json model = {{"nopa", {{"epsilon", 0.2}}}, {"model", {{"from_nopa", true}, {"gamma", 1.0}}}, {"n_max", 12}};
  json single = model;
  single["time_grid"] = {{"times", {0.0}}};
  const std::string out = run("evolve", single).primary;
  CHECK(header(out) == "t,n1,n2,re_b1b2,im_b1b2,var_sum_q,var_diff_p,purity");
  const auto r0 = rows(out);
  REQUIRE(r0.size() == 1);
  CHECK(r0[0] == std::vector<double>{0, 0, 0, 0, 0, 2, 2, 1});

  json grid = model;
  grid["time_grid"] = {{"t_end", 2.0}, {"points", 5}};
  const double n = 4.0 * 0.04 / std::pow(0.96, 2);
  for (const auto& r : rows(run("evolve", grid).primary)) CHECK(std::abs(r[1] - n * (1.0 - std::exp(-2.0 * r[0]))) < 1e-6);

  json bad = model;
  bad["time_grid"] = {{"times", {0.0, 1.0, 0.5}}};
  CHECK(field_of("evolve", bad) == "time_grid");
  bad["time_grid"] = {{"t_end", 1.0}};
  CHECK(field_of("evolve", bad) == "time_grid.points");
}

TEST_CASE("wigner") {
  const CommandOutput vac = run("wigner", {{"wigner", {{"source", "vacuum"}, {"axis", {{"min", 0}, {"max", 0}, {"points", 1}}}}}, {"n_max", 4}});
  CHECK(header(vac.primary) == "q1,p1,q2,p2,w_analytic,w_from_rho");
  const auto r = rows(vac.primary);
  REQUIRE(r.size() == 1);
  CHECK(r[0][4] == doctest::Approx(kPeak).epsilon(1e-15));
  CHECK(r[0][5] == doctest::Approx(kPeak).epsilon(1e-14));
  REQUIRE(vac.sidecars.size() == 1);
  CHECK(vac.sidecars[0].suffix == ".meta.json");
  CHECK_FALSE(json::parse(vac.sidecars[0].content)["truncation_warning"].get<bool>());

  const CommandOutput empty = run("wigner", {{"wigner", {{"axis", {{"points", 0}}}}}});
  CHECK(empty.primary == "q1,p1,q2,p2,w_analytic,w_from_rho\n");

  const CommandOutput analytic = run("wigner", {{"wigner", {{"source", "none"}, {"r", 0.3}, {"axis", {{"points", 2}}}}}});
  CHECK(header(analytic.primary) == "q1,p1,q2,p2,w_analytic");
  CHECK(rows(analytic.primary).size() == 16);

  const CommandOutput warned = run("wigner", {{"wigner", {{"r", 1.5}, {"axis", {{"points", 1}}}}}, {"n_max", 8}});
  CHECK(json::parse(warned.sidecars[0].content)["truncation_warning"].get<bool>());

  CHECK(field_of("wigner", {{"wigner", {{"source", "moon"}}}}) == "wigner.source");
  CHECK(field_of("wigner", {{"wigner", {{"r", -1.0}}}}) == "wigner.r");
}

TEST_CASE("bell-sweep") {
  const CommandOutput degenerate =
      run("bell-sweep", {{"bell", {{"r", {{"min", 0.5}, {"max", 0.5}, {"points", 1}}}, {"j", {{"min", 0}, {"max", 0}, {"points", 1}}}}}});
  CHECK(header(degenerate.primary) == "r,J,B");
  CHECK(rows(degenerate.primary)[0][2] == doctest::Approx(2.0).epsilon(1e-12));

  const CommandOutput vac = run("bell-sweep", {{"bell", {{"state", "vacuum"}, {"r", {{"points", 2}}}, {"j", {{"points", 10}}}}}});
  for (const auto& r : rows(vac.primary)) CHECK(std::abs(r[2]) <= 2.0 + 1e-9);
  CHECK_FALSE(json::parse(vac.sidecars[0].content)["violation"].get<bool>());

  const CommandOutput sq = run("bell-sweep", {{"bell", {{"r", {{"points", 3}}}, {"j", {{"points", 8}}}}}});
  const json summary = json::parse(sq.sidecars[0].content);
  CHECK(sq.sidecars[0].suffix == ".summary.json");
  CHECK(summary["violation"].get<bool>());
  CHECK(summary["max_b"].get<double>() > 2.0);
  CHECK(summary["points"] == 24);

  CHECK(field_of("bell-sweep", {{"bell", {{"j", {{"max", 16.0}}}}}}) == "bell.j.max");
  CHECK(field_of("bell-sweep", {{"bell", {{"j", {{"max", 4.0}}}, {"max_displacement", 1.5}}}}) == "bell.j.max");
  CHECK(field_of("bell-sweep", {{"bell", {{"beta2_sign", 0.5}}}}) == "bell.beta2_sign");
}

TEST_CASE("feasibility") {
  json e = {{"g0", 1e8},     {"kappa_a", 2e6}, {"gamma_atom", 5e6}, {"delta_big", 5e9}, {"eta_x", 0.05},
            {"e_laser", 4e8}, {"nu_x", 2e7},    {"kappa_c", 1e8},    {"t_decoherence", 1e-2}};
  e["g0"] = std::sqrt(70.0 * 2e6 * 5e6);
  const json rep = json::parse(run("feasibility", {{"experiment", e}}).primary);
  CHECK(rep["c1"].get<double>() == doctest::Approx(70.0).epsilon(1e-12));
  CHECK(rep["checks"].size() == 10);
  CHECK(rep["units"] == "Hz");

  json hier = e;
  hier["kappa_a"] = hier["nu_x"];
  for (const auto& c : json::parse(run("feasibility", {{"experiment", hier}}).primary)["checks"])
    if (c["name"] == "trap_vs_cavity_decay") CHECK(c["verdict"] == "fail");

  json ld = e;
  ld["r"] = 1.0;
  ld["eta_x"] = 0.05 / std::cosh(1.0);
  for (const auto& c : json::parse(run("feasibility", {{"experiment", ld}}).primary)["checks"])
    if (c["name"] == "lamb_dicke_refined") {
      CHECK(c["ratio"].get<double>() == doctest::Approx(20.0).epsilon(1e-12));
      CHECK(c["verdict"] == "pass");
    }

  json sq = e;
  sq["epsilon_over_kappa"] = 0.5;
  CHECK(json::parse(run("feasibility", {{"experiment", sq}}).primary)["r"].get<double>() == doctest::Approx(std::log(3.0)));

  json bad = e;
  bad["eta_x"] = 1.5;
  CHECK(field_of("feasibility", {{"experiment", bad}}) == "experiment");
  bad = e;
  bad.erase("nu_x");
  CHECK(field_of("feasibility", {{"experiment", bad}}) == "experiment.nu_x");
}

TEST_CASE("cascade") {
  const auto zero = rows(run("cascade", {{"cascade", {{"epsilon", 0.0}, {"kappa_over_gamma", {10, 100}}}}}).primary);
  for (const auto& r : zero) {
    CHECK(std::abs(r[1] - 2.0) < 1e-12);
    CHECK(std::abs(r[3]) < 1e-12);
  }
  const std::string out = run("cascade", {{"cascade", {{"epsilon", 0.5}, {"kappa_over_gamma", {10, 100, 1000, 10000}}}}}).primary;
  CHECK(header(out) == "kappa_over_gamma,var_sum_q,var_sum_q_whitenoise,rel_error");
  const auto r = rows(out);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i][3] < r[i - 1][3]);
  // largest ratio against the proportional fit through the smaller ones
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += r[i][3] / r[i][0];
    sxx += 1.0 / (r[i][0] * r[i][0]);
  }
  const double predicted = sxy / sxx / r[3][0];
  CHECK(r[3][3] < 2.0 * predicted);
  CHECK(r[3][3] > 0.5 * predicted);

  CHECK(field_of("cascade", {{"cascade", {{"epsilon", 0.5}, {"kappa_over_gamma", {10, -1}}}}}) == "cascade.kappa_over_gamma[1]");
}

TEST_CASE("outputs do not depend on the worker count") {
  const json bell = {{"bell", {{"r", {{"points", 4}}}, {"j", {{"points", 5}}}}}};
  const json wig = {{"wigner", {{"r", 0.4}, {"axis", {{"points", 3}}}}}, {"n_max", 12}};
  const json cas = {{"cascade", {{"epsilon", 0.4}, {"kappa_over_gamma", {3, 30, 300}}}}};
  for (const auto& [verb, body] : {std::pair{"bell-sweep", bell}, std::pair{"wigner", wig}, std::pair{"cascade", cas}}) {
    const CommandOutput one = run(verb, body, 1);
    const CommandOutput three = run(verb, body, 3);
    CHECK(one.primary == three.primary);
    REQUIRE(one.sidecars.size() == three.sidecars.size());
    for (std::size_t i = 0; i < one.sidecars.size(); ++i) CHECK(one.sidecars[i].content == three.sidecars[i].content);
  }
}

TEST_CASE("parallel_for reports the lowest failing index") {
  std::vector<int> seen(20, 0);
  parallel_for(20, 4, [&](std::size_t i) { seen[i] = 1; });
  CHECK(std::count(seen.begin(), seen.end(), 1) == 20);
  for (int workers : {1, 4}) {
    try {
      parallel_for(50, workers, [](std::size_t i) {
        if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "7");
    }
  }
}

TEST_CASE("exit-code contract") {
  CHECK(exit_code_for(std::make_exception_ptr(ConfigError("x", "bad"))) == kExitConfig);
  CHECK(exit_code_for(std::make_exception_ptr(std::invalid_argument("bad"))) == kExitConfig);
  CHECK(exit_code_for(std::make_exception_ptr(eprsim::NumericalFailure("diverged"))) == kExitNumerical);
  CHECK(exit_code_for(std::make_exception_ptr(std::runtime_error("io"))) == kExitFailure);
}

TEST_CASE("command-line binary") {
  TempDir tmp;
  const auto good = tmp.path / "good.json";
  const auto bad = tmp.path / "bad.json";
  write(good, R"({"schema_version": 1, "nopa": {"epsilon": 0.5}, "spectrum": {"min": 0, "max": 1, "points": 3}})");
  write(bad, R"({"schema_version": 1, "nopa": {"epsilon": 1.5}})");
  const auto out = tmp.path / "spec.csv";

  CHECK(run_binary("nopa-spectrum --config " + good.string() + " --out " + out.string()) == 0);
  REQUIRE(std::filesystem::exists(out));
  std::ifstream in(out);
  std::string first;
  std::getline(in, first);
  CHECK(first == "omega_over_kappa,sum_x_var,diff_y_var");

  const auto failed = tmp.path / "failed.csv";
  CHECK(run_binary("nopa-spectrum --config " + bad.string() + " --out " + failed.string()) == kExitConfig);
  CHECK_FALSE(std::filesystem::exists(failed));
  CHECK_FALSE(std::filesystem::exists(tmp.path / "failed.csv.tmp"));

  CHECK(run_binary("nopa-spectrum --config " + (tmp.path / "missing.json").string()) == kExitConfig);
  CHECK(run_binary("nopa-spectrum") == kExitConfig);
  CHECK(run_binary("warp-drive --config " + good.string()) == kExitConfig);

  const auto bell = tmp.path / "bell.json";
  write(bell, R"({"schema_version": 1, "bell": {"j": {"max": 25.0}}})");
  const auto bell_out = tmp.path / "bell.csv";
  CHECK(run_binary("bell-sweep --config " + bell.string() + " --out " + bell_out.string()) == kExitConfig);
  CHECK_FALSE(std::filesystem::exists(bell_out));
  CHECK_FALSE(std::filesystem::exists(tmp.path / "bell.csv.summary.json"));
}
