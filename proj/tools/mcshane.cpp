#include <iostream>

#include "mcshane/cli.hpp"

int main(int argc, char** argv) { return mcshane::cli::main(argc, argv, std::cout, std::cerr); }
