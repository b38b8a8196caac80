#include <iostream>

#include "dive/cli.hpp"

int main(int argc, char** argv) { return dive::cli::run(argc, argv, std::cout, std::cerr); }
