#include "eprsim/cli/app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "eprsim/cli/commands.hpp"
#include "eprsim/cli/config.hpp"
#include "eprsim/cli/log.hpp"
#include "eprsim/errors.hpp"

namespace eprsim::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a sibling temp file and rename, so a failed run leaves nothing behind.
void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

int exit_code_for(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError& e) {
    log(LogLevel::error, e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    log(LogLevel::error, e.what());
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    log(LogLevel::error, std::string("numerical failure: ") + e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    log(LogLevel::error, e.what());
  } catch (...) {
    log(LogLevel::error, "unknown error");
  }
  return kExitFailure;
}

int run_app(int argc, char** argv) {
  CLI::App app{"Motional EPR-state simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  int workers = 1;
  int n_max = 0;

  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_path, "output file (stdout if omitted)");
    sub->add_option("--workers", workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--n-max", n_max, "override the Fock truncation");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  CLI::App* sub = app.get_subcommands().front();

  try {
    const nlohmann::json config = ConfigView::parse_document(read_file(config_path));
    RunOptions options;
    options.workers = workers;
    if (sub->count("--n-max") > 0) options.n_max_override = n_max;
    options.has_out_path = !out_path.empty();

    const CommandOutput result = run_command(sub->get_name(), config, options);

    if (out_path.empty()) {
      std::cout << result.primary;
      for (const auto& side : result.sidecars) std::cerr << side.content;
    } else {
      write_atomic(out_path, result.primary);
      for (const auto& side : result.sidecars) write_atomic(out_path + side.suffix, side.content);
    }
    return kExitOk;
  } catch (...) {
    return exit_code_for(std::current_exception());
  }
}

}  // namespace eprsim::cli
