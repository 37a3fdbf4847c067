#include <iostream>

#include "neno/cli/commands.hpp"

int main(int argc, char** argv) {
    return neno::cli::fhat({argv + 1, argv + argc}, std::cout, std::cerr);
}
