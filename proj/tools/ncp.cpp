#include <iostream>

#include "ncp/cli.hpp"

int main(int argc, char** argv) { return ncp::cli::run(argc, argv, std::cout, std::cerr); }
