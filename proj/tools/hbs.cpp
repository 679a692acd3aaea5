#include <string>
#include <vector>

#include "hbs/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hbs::cli::run(args);
}
