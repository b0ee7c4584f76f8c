#include "fcl/cli.hpp"

int main(int argc, char** argv) { return fcl::cli::run(argc, argv); }
