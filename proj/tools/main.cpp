#include "cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
    return osc_ising::cli::cli_main(argc, argv, std::cout, std::cerr);
}
