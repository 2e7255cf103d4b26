#include <iostream>

#include "spingain/cli.hpp"

int main(int argc, char** argv) { return spingain::cli::run(argc, argv, std::cout, std::cerr); }
