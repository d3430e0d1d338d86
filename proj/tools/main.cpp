#include <iostream>
#include <string>
#include <vector>

#include "kuramoto/cli.hpp"

int main(int argc, char** argv) {
  return kuramoto::cli::main_entry(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
