#include <iostream>

#include "hlpv/cli/commands.h"

int main(int argc, char** argv) {
  return hlpv::cli::Run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
