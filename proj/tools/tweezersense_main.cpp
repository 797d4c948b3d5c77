#include <iostream>

#include "tweezersense/cli/commands.hpp"

int main(int argc, char** argv) { return tweezersense::cli::run(argc, argv, std::cout, std::cerr); }
