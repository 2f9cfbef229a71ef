#include <iostream>

#include "kpeval/cli.hpp"

int main(int argc, char** argv) { return kpeval::run_cli(argc, argv, std::cout, std::cerr); }
