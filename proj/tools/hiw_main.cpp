#include <iostream>

#include "hiw/cli.hpp"

int main(int argc, char** argv) { return hiw::cli_main(argc, argv, std::cout, std::cerr); }
