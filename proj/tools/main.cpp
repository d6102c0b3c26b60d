#include <iostream>

#include "globest/cli.hpp"

int main(int argc, char** argv) { return globest::run_cli(argc, argv, std::cout, std::cerr); }
