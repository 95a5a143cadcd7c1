#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return nvmix::cli::run(argc, argv, std::cout, std::cerr); }
