#include <iostream>

#include "magicsim/cli.hpp"

int main(int argc, char** argv) { return magicsim::run_cli(argc, argv, std::cout, std::cerr); }
