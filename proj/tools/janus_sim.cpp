#include <iostream>
#include <string>
#include <vector>

#include "janus/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return janus::cli::run(args, std::cout, std::cerr);
}
