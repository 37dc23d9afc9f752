#include <iostream>

#include "oql/cli.hpp"

int main(int argc, char** argv) { return oql::run_cli(argc, argv, std::cout, std::cerr); }
