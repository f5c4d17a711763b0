#include <iostream>

#include "fbcp/cli.hpp"

int main(int argc, char** argv) { return fbcp::cli::run(argc, argv, std::cout, std::cerr); }
