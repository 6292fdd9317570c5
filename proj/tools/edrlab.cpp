#include <iostream>

#include "edrlab/cli.hpp"

int main(int argc, char** argv) { return edrlab::cli::run_cli(argc, argv, std::cout, std::cerr); }
