#include <iostream>

#include "dpsi/cli.hpp"

int main(int argc, char** argv) { return dpsi::run_cli(argc, argv, std::cout, std::cerr); }
