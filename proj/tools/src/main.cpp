#include <iostream>

#include "fewshot_cli/commands.hpp"

int main(int argc, char** argv) { return fewshot::cli::run_cli(argc, argv, std::cout, std::cerr); }
