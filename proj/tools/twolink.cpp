#include <iostream>

#include "twolink/cli.hpp"

int main(int argc, char** argv) { return twolink::run_cli(argc, argv, std::cout, std::cerr); }
