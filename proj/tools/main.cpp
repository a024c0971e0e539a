#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return squarecut::cli::run(argc, argv, std::cout, std::cerr); }
