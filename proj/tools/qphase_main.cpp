#include "qphase/cli.hpp"

int main(int argc, char** argv) { return qphase::run_cli(argc, argv); }
