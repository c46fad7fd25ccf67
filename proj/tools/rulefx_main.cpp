#include <iostream>

#include "rulefx/cli.hpp"

int main(int argc, char** argv) {
    return rulefx::run_cli(argc, argv, std::cout, std::cerr);
}
