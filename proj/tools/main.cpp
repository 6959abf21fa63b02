#include "pmd_cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return pmdcli::run(argc, argv, std::cout, std::cerr);
}
