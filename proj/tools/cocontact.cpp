#include <iostream>

#include "cocontact/cli.hpp"

int main(int argc, char** argv) {
  return cocontact::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
