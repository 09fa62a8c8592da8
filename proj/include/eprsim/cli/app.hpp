#pragma once

#include <exception>

namespace eprsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Logs the error and maps it onto the exit-code contract.
int exit_code_for(std::exception_ptr error);

// Full command-line entry point.
int run_app(int argc, char** argv);

}  // namespace eprsim::cli
