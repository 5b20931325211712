#include <iostream>

#include "xvh/cli.hpp"

int main(int argc, char** argv) { return xvh::cli::run(argc, argv, std::cout, std::cerr); }
