#include <iostream>

#include "fracsym/cli.hpp"

int main(int argc, char** argv) {
  using namespace fracsym::cli;
  try {
    ExperimentConfig cfg = parse_args(argc, argv);
    return run(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
