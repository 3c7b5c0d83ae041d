#include "cceg/cli.hpp"

int main(int argc, char** argv) { return cceg::cli_main(argc, argv); }
