#include <iostream>

#include "bykov/cli.hpp"

int main(int argc, char** argv) { return bykov::run_cli(argc, argv, std::cout, std::cerr); }
