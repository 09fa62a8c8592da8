// eprsim <command> --config run.json [--out path] [--workers n] [--n-max n]

#include "eprsim/cli/app.hpp"

int main(int argc, char** argv) { return eprsim::cli::run_app(argc, argv); }
