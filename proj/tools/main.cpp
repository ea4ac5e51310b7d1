#include <iostream>

#include "entlayer/cli.hpp"

int main(int argc, char** argv) { return entlayer::run_cli(argc, argv, std::cout, std::cerr); }
