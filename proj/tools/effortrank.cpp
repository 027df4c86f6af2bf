#include <iostream>

#include "effortrank/cli.hpp"

int main(int argc, char** argv) {
    return effortrank::cli::run(argc, argv, std::cout, std::cerr);
}
