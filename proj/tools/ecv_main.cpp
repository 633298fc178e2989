#include <iostream>

#include "ecv/cli.hpp"

int main(int argc, char** argv) {
    return ecv::run_cli(argc, argv, std::cout, std::cerr);
}
