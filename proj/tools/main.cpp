#include <iostream>

#include "tailsearch/cli/commands.hpp"

int main(int argc, char** argv) {
  return tailsearch::cli::run(argc, argv, std::cout, std::cerr);
}
