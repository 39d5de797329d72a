#include <iostream>

#include "freemarkov/cli.hpp"

int main(int argc, char** argv) {
  return freemarkov::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
