#include <iostream>

#include "fixsr/cli.hpp"

int main(int argc, char** argv) { return fixsr::cli_main(argc, argv, std::cout, std::cerr); }
