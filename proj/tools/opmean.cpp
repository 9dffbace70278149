#include "opmean/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return opmean::cli::run(argc, argv, std::cout, std::cerr);
}
