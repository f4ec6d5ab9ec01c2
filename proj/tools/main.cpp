#include "wforge_cli.hpp"

int main(int argc, char** argv) { return wforge::cli::run(argc, argv); }
