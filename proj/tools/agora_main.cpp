#include <string>
#include <vector>

#include "agora/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return agora::cli::run(std::move(args));
}
