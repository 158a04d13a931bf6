#include "cli.hpp"

int main(int argc, char** argv) { return leaksim::cli::run_cli(argc, argv); }
