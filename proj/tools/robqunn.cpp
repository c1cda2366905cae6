#include <iostream>

#include "robqunn/cli.hpp"

int main(int argc, char** argv) {
  return robqunn::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
