#include <iostream>

#include "cascaderisk/cli.hpp"

int main(int argc, char** argv) { return cascaderisk::cli::run(argc, argv, std::cout, std::cerr); }
