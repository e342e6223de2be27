#include <iostream>

#include "harness/experiment.hpp"

int main(int argc, char** argv) { return harness::cli_main(argc, argv, std::cout, std::cerr); }
