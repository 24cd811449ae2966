#include <iostream>
#include <string>
#include <vector>

#include "otdro/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return otdro::cli::run_command(args, std::cout, std::cerr);
}
