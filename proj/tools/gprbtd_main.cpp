#include <iostream>

#include "gprbtd/cli.hpp"

int main(int argc, char** argv) { return gprbtd::run_cli(argc, argv, std::cout, std::cerr); }
