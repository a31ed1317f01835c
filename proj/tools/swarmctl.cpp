#include "cli_app.hpp"

int main(int argc, char** argv) { return swarmctl::run_cli(argc, argv); }
