#include "spatspec/cli.hpp"

int main(int argc, char** argv) { return spatspec::run_cli(argc, argv); }
