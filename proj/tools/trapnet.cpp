#include <iostream>

#include "trapnet/cli.hpp"

int main(int argc, char** argv) { return trapnet::run_cli(argc, argv, std::cout, std::cerr); }
