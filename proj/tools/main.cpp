#include <iostream>

#include "slgeo/cli.hpp"

int main(int argc, char** argv) { return slgeo::cli::run(argc, argv, std::cout, std::cerr); }
