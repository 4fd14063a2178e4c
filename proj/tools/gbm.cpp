#include "gbm/cli_runner.hpp"

int main(int argc, char** argv) { return gbm::cli::run_cli(argc, argv); }
