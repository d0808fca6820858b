#include "sdm_cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return sdm::cli::run(argc, argv, std::cout, std::cerr); }
