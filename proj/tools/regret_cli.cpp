#include <iostream>

#include "regret/cli.hpp"

int main(int argc, char** argv) { return regret::cli::run_main(argc, argv, std::cout, std::cerr); }
