#include "cli/commands.hpp"

int main(int argc, char** argv) { return prstab::cli::run_cli(argc, argv); }
