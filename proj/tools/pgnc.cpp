#include <iostream>

#include "pgnc/cli.hpp"

int main(int argc, char** argv) {
  return pgnc::run_cli(argc, argv, std::cout, std::cerr);
}
