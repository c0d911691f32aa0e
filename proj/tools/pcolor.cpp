#include "pcolor/cli.hpp"

int main(int argc, char** argv) {
  return pcolor::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
