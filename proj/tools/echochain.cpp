#include <iostream>

#include "echochain/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return echochain::run_cli(std::move(args), std::cout, std::cerr);
}
