#include "sbmd/cli.hpp"

int main(int argc, char** argv) { return sbmd::cli_main(argc, argv); }
