#include "hsmooth/cli.hpp"

int main(int argc, char** argv) { return hsmooth::cli_main(argc, argv); }
