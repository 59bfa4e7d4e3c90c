#include <iostream>

#include "zetasum/run.hpp"

int main(int argc, char** argv) { return zetasum::run_cli(argc, argv, std::cout, std::cerr); }
