#include <iostream>

#include "oscdecon/cli.hpp"

int main(int argc, char** argv) { return oscdecon::run_cli(argc, argv, std::cout, std::cerr); }
