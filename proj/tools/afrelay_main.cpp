#include "afrelay/cli.hpp"

int main(int argc, char** argv) { return afrelay::cli::run(argc, argv); }
