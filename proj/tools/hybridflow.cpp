#include "hybridflow/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hybridflow::run_cli(argc, argv, std::cout, std::cerr); }
