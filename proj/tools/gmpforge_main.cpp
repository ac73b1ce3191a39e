#include <iostream>
#include <string>
#include <vector>

#include "gmpforge/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gmpforge::run_cli(args, std::cout, std::cerr);
}
