#include "mtf/cli.hpp"

int main(int argc, char** argv) { return mtf::cli::main_entry(argc, argv); }
