#include <iostream>
#include <string>
#include <vector>

#include "driftev/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return driftev::run_cli(args, std::cout, std::cerr);
}
