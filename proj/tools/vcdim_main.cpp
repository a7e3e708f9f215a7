#include "vcdim/cli.hpp"

int main(int argc, char** argv) { return vcdim::cli::main_entry(argc, argv); }
