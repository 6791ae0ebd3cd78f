#include <iostream>

#include "litfacet/service.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return litfacet::run_cli(std::move(args), std::cout, std::cerr);
}
