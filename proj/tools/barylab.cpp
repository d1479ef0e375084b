#include <iostream>

#include "barylab/cli.hpp"

int main(int argc, char** argv) { return barylab::run_main(argc, argv, std::cout, std::cerr); }
