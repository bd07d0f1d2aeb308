#include <iostream>

#include "qzd/cli.hpp"

int main(int argc, char** argv) { return qzd::run_cli(argc, argv, std::cout, std::cerr); }
