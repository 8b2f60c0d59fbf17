#include "jrc/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return jrc::cli::run(argc, argv, std::cout, std::cerr); }
