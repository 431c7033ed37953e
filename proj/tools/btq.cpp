#include <iostream>

#include "btq/cli.hpp"

int main(int argc, char** argv) { return btq::btq_main(argc, argv, std::cout, std::cerr); }
