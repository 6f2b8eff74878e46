#include <iostream>

#include "aerq/cli.hpp"

int main(int argc, char** argv) {
    return aerq::cli::main(argc, argv, std::cout, std::cerr);
}
