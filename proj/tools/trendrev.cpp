#include <iostream>
#include <string>
#include <vector>

#include "trendrev/cli.hpp"

int main(int argc, char** argv) {
  return trendrev::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
