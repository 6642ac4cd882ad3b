#include "drcvar/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return drcvar::cli::main(argc, argv, std::cout, std::cerr); }
