#include <iostream>

#include "fed/cli.hpp"

int main(int argc, char** argv) { return fed::cli::run(argc, argv, std::cout, std::cerr); }
