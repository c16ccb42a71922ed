#include <iostream>
#include <string>
#include <vector>

#include "tbea/cli.hpp"

int main(int argc, char** argv) {
  return tbea::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
