#include "hausdorff/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hausdorff::run_cli(argc, argv, std::cout, std::cerr); }
