#include <iostream>

#include "nichecma/cli.hpp"

int main(int argc, char** argv)
{
    return nichecma::cli_main(argc, argv, std::cout, std::cerr);
}
