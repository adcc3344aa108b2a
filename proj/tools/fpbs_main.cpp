#include "fpbs/cli.hpp"

int main(int argc, char** argv) { return fpbs::cli::run_cli(argc, argv); }
