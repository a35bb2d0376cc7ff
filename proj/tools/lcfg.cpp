#include <iostream>

#include "lcfg/cli.hpp"

int main(int argc, char** argv) { return lcfg::cli::run(argc, argv, std::cout, std::cerr); }
