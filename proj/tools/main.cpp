#include "swopt/cli.hpp"

int main(int argc, char** argv) { return swopt::cli::main(argc, argv); }
