#include <iostream>

#include "historica/cli.hpp"

int main(int argc, char** argv) { return historica::cli::run(argc, argv, std::cout, std::cerr); }
