#include <iostream>

#include "vislab/cli.hpp"

int main(int argc, char** argv) {
    return vislab::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
