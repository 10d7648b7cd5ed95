#include <iostream>

#include "tanred/cli.hpp"

int main(int argc, char** argv) { return tanred::run_cli(argc, argv, std::cout, std::cerr); }
