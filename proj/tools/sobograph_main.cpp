#include <iostream>

#include "sobograph/cli.hpp"

int main(int argc, char** argv) { return sobograph::cli::run(argc, argv, std::cout, std::cerr); }
