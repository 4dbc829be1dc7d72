#include <iostream>

#include "desv/cli.hpp"

int main(int argc, char** argv) { return desv::cli_main(argc, argv, std::cout, std::cerr); }
