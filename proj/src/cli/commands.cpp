#include "eprsim/cli/commands.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "eprsim/cli/config.hpp"
#include "eprsim/cli/csv.hpp"
#include "eprsim/cli/log.hpp"
#include "eprsim/errors.hpp"
#include "eprsim/feasibility.hpp"
#include "eprsim/gaussian.hpp"
#include "eprsim/lindblad.hpp"
#include "eprsim/metrics.hpp"
#include "eprsim/nopa.hpp"
#include "eprsim/states.hpp"

namespace eprsim::cli {

using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Runs a library constructor or validator and reports its complaint against
// the config field that fed it.
template <class Fn>
auto checked(const std::string& field, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(field, e.what());
  }
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

int resolve_n_max(const ConfigView& root, const RunOptions& opt, int fallback) {
  int n = fallback;
  if (root.has("n_max")) n = root.integer("n_max");
  if (opt.n_max_override) n = *opt.n_max_override;
  require(n >= 2, opt.n_max_override ? "--n-max" : "n_max", "must be >= 2");
  require(n <= 200, opt.n_max_override ? "--n-max" : "n_max", "must be <= 200");
  return n;
}

struct Range {
  double lo, hi;
  int points;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[std::size_t(i)] = points == 1 ? lo : lo + (hi - lo) * double(i) / double(points - 1);
    return v;
  }
};

Range parse_range(const ConfigView& v, Range fallback, bool allow_zero_points) {
  Range r{v.number_or("min", fallback.lo), v.number_or("max", fallback.hi), v.integer_or("points", fallback.points)};
  require(r.points >= (allow_zero_points ? 0 : 1), v.field("points"),
          allow_zero_points ? "must be >= 0" : "must be >= 1");
  require(r.hi >= r.lo, v.field("max"), "must be >= min");
  return r;
}

nopa::NopaParams parse_nopa(const ConfigView& root) {
  const ConfigView block = root.block("nopa");
  const double eps = block.number("epsilon");
  return checked(block.field("epsilon"), [&] { return nopa::NopaParams(eps, 1.0); });
}

// Rates are in units of kappa_c when a nopa block drives the model, otherwise
// in units of gamma (which then defaults to 1).
struct ModelSpec {
  lindblad::LindbladModel model;
  bool from_nopa = false;
  double r = 0.0;  // squeeze parameter of the ideal target state
};

ModelSpec parse_model(const ConfigView& root) {
  const ConfigView block = root.block("model");
  ModelSpec spec;
  spec.from_nopa = block.boolean_or("from_nopa", false);
  const double gamma = block.number_or("gamma", 1.0);
  const double heating = block.number_or("heating_rate", 0.0);
  require(gamma > 0.0, block.field("gamma"), "must be > 0");
  require(heating >= 0.0, block.field("heating_rate"), "must be >= 0");
  if (spec.from_nopa) {
    require(!block.has("n") && !block.has("m"), block.field("from_nopa"), "cannot be combined with explicit n/m");
    const nopa::NopaParams p = parse_nopa(root);
    spec.model = lindblad::LindbladModel::from_nopa(p, gamma, heating);
  } else {
    spec.model = {gamma, block.number("n"), block.number("m"), heating};
  }
  checked(block.path(), [&] {
    spec.model.validate();
    return 0;
  });
  spec.r = std::asinh(std::sqrt(spec.model.n_param));
  return spec;
}

json model_json(const ModelSpec& s) {
  json j{{"gamma", s.model.gamma},
         {"n", s.model.n_param},
         {"m", s.model.m_param},
         {"heating_rate", s.model.heating_rate},
         {"derived_from_nopa", s.from_nopa},
         {"r", s.r}};
  if (s.model.heating_rate > 0.0) j["heating_occupation"] = lindblad::kHeatingOccupation;
  return j;
}

// ---------------------------------------------------------------- commands

CommandOutput cmd_nopa_spectrum(const ConfigView& root, const RunOptions&) {
  const nopa::NopaParams p = parse_nopa(root);
  const Range grid = root.has("spectrum") ? parse_range(root.block("spectrum"), {-5.0, 5.0, 101}, true)
                                          : Range{-5.0, 5.0, 101};
  const std::vector<double> omega = grid.values();
  const nopa::SpectrumTable t = nopa::squeezing_spectra(p, omega);
  CsvWriter csv{"omega_over_kappa", "sum_x_var", "diff_y_var"};
  for (std::size_t i = 0; i < t.omega.size(); ++i) csv.row({t.omega[i], t.sum_x_variance[i], t.diff_y_variance[i]});
  return {csv.str(), {}};
}

CommandOutput cmd_steady_state(const ConfigView& root, const RunOptions& opt) {
  const ModelSpec spec = parse_model(root);
  const int n_max = resolve_n_max(root, opt, recommended_n_max(spec.r));
  bool dump_density = false;
  if (auto out = root.optional_block("output")) {
    dump_density = out->boolean_or("density_csv", false);
    require(!dump_density || opt.has_out_path, out->field("density_csv"), "requires --out");
  }

  const FockBasis basis = FockBasis::two_mode(n_max);
  const lindblad::SteadyStateResult ss = lindblad::steady_state(spec.model, basis);
  if (ss.truncation_warning)
    log(LogLevel::warn, "steady-state: population near the truncation edge; increase n_max");
  log(LogLevel::info, "steady-state: method " + ss.method + ", residual " + format_double(ss.residual));

  const PureState target = states::tmss_fock(states::TmssSpec(spec.r), basis);
  const lindblad::MomentRecord mom = lindblad::record_moments(ss.rho);
  const metrics::EprCriterion epr = metrics::epr_criterion(mom.var_sum_q, mom.var_diff_p);

  const gaussian::CovarianceState cov = gaussian::steady_covariance(gaussian::model_from_lindblad(spec.model));
  const gaussian::EprVariances gv = gaussian::epr_variances(cov);

  json j;
  j["n_max"] = n_max;
  j["model"] = model_json(spec);
  j["fidelity_to_tmss"] = metrics::fidelity(ss.rho, target);
  j["purity"] = lindblad::purity(ss.rho);
  j["mean_phonons"] = {metrics::mean_phonon(ss.rho, 0), metrics::mean_phonon(ss.rho, 1)};
  j["b1b2"] = {mom.b1b2.real(), mom.b1b2.imag()};
  j["epr_variances"] = {{"var_sum_q", mom.var_sum_q}, {"var_diff_p", mom.var_diff_p}};
  j["epr_criterion"] = {{"value", epr.value}, {"bound", metrics::kSeparableBound}, {"entangled", epr.entangled}};
  j["gaussian"] = {{"var_sum_q", gv.var_sum_q},
                   {"var_diff_p", gv.var_diff_p},
                   {"log_negativity", metrics::log_negativity(cov)}};
  j["solver"] = {{"method", ss.method}, {"iterations", ss.iterations}, {"residual", ss.residual}};
  j["truncation_warning"] = ss.truncation_warning;

  CommandOutput out{dump(j), {}};
  if (dump_density) {
    CsvWriter csv{"row", "col", "re", "im"};
    const CMatrix& m = ss.rho.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (m(r, c) != Complex(0.0)) csv.row({double(r), double(c), m(r, c).real(), m(r, c).imag()});
    out.sidecars.push_back({".density.csv", csv.str()});
  }
  return out;
}

CommandOutput cmd_evolve(const ConfigView& root, const RunOptions& opt) {
  const ModelSpec spec = parse_model(root);
  const int n_max = resolve_n_max(root, opt, recommended_n_max(spec.r));
  const ConfigView tg = root.block("time_grid");
  std::vector<double> times;
  if (tg.has("times")) {
    times = tg.numbers("times");
    require(!times.empty(), tg.field("times"), "must not be empty");
  } else {
    const double t_end = tg.number("t_end");
    const int points = tg.integer("points");
    require(t_end >= 0.0, tg.field("t_end"), "must be >= 0");
    require(points >= 1, tg.field("points"), "must be >= 1");
    require(points == 1 || t_end > 0.0, tg.field("t_end"), "must be > 0 when points > 1");
    times = Range{0.0, t_end, points}.values();
  }
  require(times.front() >= 0.0, tg.path(), "times must be >= 0");
  for (std::size_t i = 1; i < times.size(); ++i) require(times[i] > times[i - 1], tg.path(), "times must be strictly increasing");

  const FockBasis basis = FockBasis::two_mode(n_max);
  lindblad::EvolveOptions eo;
  eo.keep_states = false;
  const lindblad::EvolutionResult res = lindblad::evolve(DensityMatrix::vacuum(basis), spec.model, times, eo);

  CsvWriter csv{"t", "n1", "n2", "re_b1b2", "im_b1b2", "var_sum_q", "var_diff_p", "purity"};
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    const auto& m = res.moments[i];
    csv.row({res.times[i], m.n1, m.n2, m.b1b2.real(), m.b1b2.imag(), m.var_sum_q, m.var_diff_p, m.purity});
  }
  return {csv.str(), {}};
}

CommandOutput cmd_wigner(const ConfigView& root, const RunOptions& opt) {
  const ConfigView w = root.block("wigner");
  const std::string source = w.string_or("source", "tmss");
  require(source == "tmss" || source == "vacuum" || source == "steady_state" || source == "none", w.field("source"),
          "must be one of tmss, vacuum, steady_state, none");

  double r = 0.0;
  std::optional<ModelSpec> model;
  if (source == "steady_state") {
    model = parse_model(root);
    r = model->r;
  } else if (source != "vacuum") {
    r = w.number_or("r", 0.0);
    checked(w.field("r"), [&] { return states::TmssSpec(r); });
  }
  const Range axis = w.has("axis") ? parse_range(w.block("axis"), {-2.0, 2.0, 5}, true) : Range{-2.0, 2.0, 5};
  const bool with_rho = source != "none";
  const int n_max = with_rho ? resolve_n_max(root, opt, recommended_n_max(r)) : 0;

  const states::TmssSpec tmss(r);
  states::WignerGrid grid = states::WignerGrid::uniform(axis.lo, axis.hi, std::size_t(axis.points));
  const states::WignerGrid analytic = states::wigner_analytic_grid(tmss, grid);

  std::optional<DensityMatrix> rho;
  if (with_rho) {
    const FockBasis basis = FockBasis::two_mode(n_max);
    if (source == "tmss") rho = DensityMatrix::from_pure(states::tmss_fock(tmss, basis));
    else if (source == "vacuum") rho = DensityMatrix::vacuum(basis);
    else rho = lindblad::steady_state(model->model, basis).rho;
  }

  std::vector<double> numeric(grid.size(), 0.0);
  bool truncation = false;
  if (rho && grid.size() > 0) {
    const std::size_t slab = grid.size() / grid.q1.size();
    std::vector<char> warn(grid.q1.size(), 0);
    parallel_for(grid.q1.size(), opt.workers, [&](std::size_t i) {
      states::WignerGrid sub = grid;
      sub.q1 = {grid.q1[i]};
      sub = states::wigner_from_density(*rho, sub);
      std::copy(sub.values.begin(), sub.values.end(), numeric.begin() + std::ptrdiff_t(i * slab));
      warn[i] = sub.truncation_warning;
    });
    truncation = std::find(warn.begin(), warn.end(), 1) != warn.end();
  } else if (rho) {
    truncation = top_level_population(*rho) > states::kTruncationWarnPopulation;
  }
  if (truncation) log(LogLevel::warn, "wigner: population near the truncation edge; increase n_max");

  CsvWriter csv = with_rho ? CsvWriter{"q1", "p1", "q2", "p2", "w_analytic", "w_from_rho"}
                           : CsvWriter{"q1", "p1", "q2", "p2", "w_analytic"};
  double max_dev = 0.0;
  for (std::size_t i = 0; i < grid.q1.size(); ++i)
    for (std::size_t j = 0; j < grid.p1.size(); ++j)
      for (std::size_t k = 0; k < grid.q2.size(); ++k)
        for (std::size_t l = 0; l < grid.p2.size(); ++l) {
          const std::size_t f = grid.flat_index(i, j, k, l);
          if (with_rho) {
            csv.row({grid.q1[i], grid.p1[j], grid.q2[k], grid.p2[l], analytic.values[f], numeric[f]});
            max_dev = std::max(max_dev, std::abs(analytic.values[f] - numeric[f]));
          } else {
            csv.row({grid.q1[i], grid.p1[j], grid.q2[k], grid.p2[l], analytic.values[f]});
          }
        }

  json meta{{"source", source}, {"r", r}, {"points_per_axis", axis.points}, {"truncation_warning", truncation}};
  if (with_rho) {
    meta["n_max"] = n_max;
    meta["max_abs_deviation"] = max_dev;
  }
  return {csv.str(), {{".meta.json", dump(meta)}}};
}

CommandOutput cmd_bell_sweep(const ConfigView& root, const RunOptions& opt) {
  static const json kEmpty = json::object();
  const ConfigView b = root.has("bell") ? root.block("bell") : ConfigView(kEmpty, "bell");
  const std::string state = b.string_or("state", "tmss");
  require(state == "tmss" || state == "vacuum", b.field("state"), "must be tmss or vacuum");
  const Range rr = b.has("r") ? parse_range(b.block("r"), {0.1, 1.2, 12}, true) : Range{0.1, 1.2, 12};
  const Range jr = b.has("j") ? parse_range(b.block("j"), {0.01, 0.5, 50}, true) : Range{0.01, 0.5, 50};
  require(rr.lo >= 0.0, b.field("r.min"), "must be >= 0");
  require(jr.lo >= 0.0, b.field("j.min"), "must be >= 0");
  const double sign = b.number_or("beta2_sign", 1.0);
  require(sign == 1.0 || sign == -1.0, b.field("beta2_sign"), "must be 1 or -1");
  const double max_mag = b.number_or("max_displacement", metrics::kDefaultMaxDisplacement);
  require(max_mag > 0.0, b.field("max_displacement"), "must be > 0");
  if (jr.points > 0) {
    const double largest = std::sqrt(jr.hi);
    if (largest > max_mag) {
      std::ostringstream msg;
      msg << "sqrt(j.max) = " << largest << " exceeds the truncation-safety bound " << max_mag;
      throw ConfigError(b.field("j.max"), msg.str());
    }
  }
  const int n_max = resolve_n_max(root, opt, state == "tmss" && rr.points > 0 ? recommended_n_max(rr.hi) : 2);

  // settings: alpha1 = beta1 = 0, alpha2 = sqrt(J), beta2 = sign * sqrt(J)
  const std::vector<double> rs = rr.values();
  const std::vector<double> js = jr.values();
  const FockBasis basis = FockBasis::two_mode(n_max);
  std::vector<double> values(rs.size() * js.size());
  std::vector<char> warn(rs.size(), 0);
  parallel_for(rs.size(), opt.workers, [&](std::size_t i) {
    const PureState psi =
        state == "tmss" ? states::tmss_fock(states::TmssSpec(rs[i]), basis) : PureState::fock(basis, 0);
    for (std::size_t k = 0; k < js.size(); ++k) {
      const double a = std::sqrt(js[k]);
      const metrics::BellSettings s{0.0, a, 0.0, sign * a, max_mag};
      values[i * js.size() + k] = metrics::chsh_value(psi, s);
      if (k == 0) warn[i] = metrics::parity_correlation(psi, 0.0, 0.0, max_mag).truncation_warning;
    }
  });

  CsvWriter csv{"r", "J", "B"};
  json summary{{"state", state}, {"n_max", n_max}, {"points", values.size()}, {"beta2_sign", sign}};
  std::size_t best = 0;
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t k = 0; k < js.size(); ++k) {
      const std::size_t f = i * js.size() + k;
      csv.row({rs[i], js[k], values[f]});
      if (values[f] > values[best]) best = f;
    }
  const bool truncation = std::find(warn.begin(), warn.end(), 1) != warn.end();
  if (truncation) log(LogLevel::warn, "bell-sweep: population near the truncation edge; increase n_max");
  if (!values.empty()) {
    summary["max_b"] = values[best];
    summary["argmax"] = {{"r", rs[best / js.size()]}, {"J", js[best % js.size()]}};
    summary["violation"] = values[best] > 2.0;
  } else {
    summary["max_b"] = nullptr;
    summary["argmax"] = nullptr;
    summary["violation"] = false;
  }
  summary["truncation_warning"] = truncation;
  return {csv.str(), {{".summary.json", dump(summary)}}};
}

CommandOutput cmd_feasibility(const ConfigView& root, const RunOptions&) {
  const ConfigView e = root.block("experiment");
  feasibility::ExperimentParams p;
  p.g0 = e.number("g0");
  p.kappa_a = e.number("kappa_a");
  p.gamma_atom = e.number("gamma_atom");
  p.delta_big = e.number("delta_big");
  p.eta_x = e.number("eta_x");
  p.e_laser = e.number("e_laser");
  p.nu_x = e.number("nu_x");
  p.kappa_c = e.number("kappa_c");
  p.t_decoherence = e.number("t_decoherence");
  if (e.has("nu_y")) p.nu_y = e.number("nu_y");
  if (e.has("nu_z")) p.nu_z = e.number("nu_z");
  if (e.has("phi_laser")) p.phi_laser = e.number("phi_laser");
  checked(e.path(), [&] {
    p.validate();
    return 0;
  });
  double r = 0.0;
  if (e.has("r")) {
    require(!e.has("epsilon_over_kappa"), e.field("r"), "give either r or epsilon_over_kappa");
    r = e.number("r");
    require(r >= 0.0, e.field("r"), "must be >= 0");
  } else if (e.has("epsilon_over_kappa")) {
    const double f = e.number("epsilon_over_kappa");
    r = checked(e.field("epsilon_over_kappa"), [&] { return nopa::squeeze_parameter(nopa::NopaParams(f, 1.0)); });
  }
  const double threshold = e.number_or("ratio_threshold", 10.0);
  require(threshold > 0.0, e.field("ratio_threshold"), "must be > 0");

  const feasibility::FeasibilityReport rep = feasibility::check_all(p, r, threshold);
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back(
        {{"name", c.name}, {"ratio", c.ratio}, {"threshold", c.threshold}, {"verdict", feasibility::to_string(c.verdict)}});
  json j{{"units", "Hz"}, {"gamma_eff", rep.gamma_eff}, {"c1", rep.c1}, {"r", r}, {"ratio_threshold", threshold},
         {"checks", checks}};
  return {dump(j), {}};
}

CommandOutput cmd_cascade(const ConfigView& root, const RunOptions& opt) {
  const ConfigView c = root.block("cascade");
  const double eps = c.number("epsilon");
  checked(c.field("epsilon"), [&] { return nopa::NopaParams(eps, 1.0); });
  const std::vector<double> ratios = c.numbers("kappa_over_gamma");
  for (std::size_t i = 0; i < ratios.size(); ++i)
    require(ratios[i] > 0.0, c.field("kappa_over_gamma") + "[" + std::to_string(i) + "]", "must be > 0");

  // gamma = 1, kappa_c = ratio; the white-noise limit does not depend on the ratio
  const double gamma = 1.0;
  const lindblad::LindbladModel white = lindblad::LindbladModel::from_nopa(nopa::NopaParams(eps, 1.0), gamma);
  const double target = gaussian::epr_variances(gaussian::steady_covariance(gaussian::model_from_lindblad(white))).var_sum_q;

  std::vector<double> values(ratios.size());
  parallel_for(ratios.size(), opt.workers, [&](std::size_t i) {
    const nopa::NopaParams p(eps * ratios[i], ratios[i]);
    const gaussian::CovarianceState full = gaussian::steady_covariance(gaussian::cascade_model(p, gamma));
    values[i] = gaussian::epr_variances(full.reduced({2, 3})).var_sum_q;
  });

  CsvWriter csv{"kappa_over_gamma", "var_sum_q", "var_sum_q_whitenoise", "rel_error"};
  for (std::size_t i = 0; i < ratios.size(); ++i)
    csv.row({ratios[i], values[i], target, std::abs(values[i] - target) / target});
  return {csv.str(), {}};
}

using Handler = std::function<CommandOutput(const ConfigView&, const RunOptions&)>;

const std::map<std::string, Handler, std::less<>>& handlers() {
  static const std::map<std::string, Handler, std::less<>> table{
      {"nopa-spectrum", cmd_nopa_spectrum}, {"steady-state", cmd_steady_state}, {"evolve", cmd_evolve},
      {"wigner", cmd_wigner},               {"bell-sweep", cmd_bell_sweep},     {"feasibility", cmd_feasibility},
      {"cascade", cmd_cascade}};
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"nopa-spectrum", "steady-state", "evolve",  "wigner",
                                              "bell-sweep",    "feasibility",  "cascade"};
  return names;
}

CommandOutput run_command(std::string_view verb, const json& config, const RunOptions& options) {
  const auto it = handlers().find(verb);
  if (it == handlers().end()) throw ConfigError("<command>", "unknown command '" + std::string(verb) + "'");
  if (options.workers < 1) throw ConfigError("--workers", "must be >= 1");
  ConfigView::check_document(config);
  const ConfigView root(config, "");
  return it->second(root, options);
}

}  // namespace eprsim::cli
