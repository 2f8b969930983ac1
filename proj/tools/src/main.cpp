#include <iostream>

#include "run.hpp"

int main(int argc, char** argv) { return fracsurf::cli::run(argc, argv, std::cout, std::cerr); }
