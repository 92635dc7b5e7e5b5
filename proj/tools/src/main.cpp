#include "run.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return ballsaddle::cli::run_cli(argc, argv, std::cout, std::cerr);
}
