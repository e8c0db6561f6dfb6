#include "qawall/cli.hpp"

int main(int argc, char** argv) { return qawall::cli::main(argc, argv); }
