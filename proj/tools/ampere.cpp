#include <iostream>

#include "ampere/cli.hpp"

int main(int argc, char** argv) { return ampere::run_cli(argc, argv, std::cout, std::cerr); }
