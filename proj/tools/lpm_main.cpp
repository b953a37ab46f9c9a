#include <iostream>
#include <string>
#include <vector>

#include "lpm/cli.hpp"

int main(int argc, char** argv) {
    return lpm::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
