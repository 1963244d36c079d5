#include <string>
#include <vector>

#include "difga/cli.hpp"

int main(int argc, char** argv) {
  return difga::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
