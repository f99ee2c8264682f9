#include "toprank/cli.hpp"

int main(int argc, char** argv) { return toprank::cli::main(argc, argv); }
