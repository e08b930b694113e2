#include <iostream>

#include "hrbr/cli.hpp"

int main(int argc, char** argv) { return hrbr::run_cli(argc, argv, std::cout, std::cerr); }
