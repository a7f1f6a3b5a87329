#include "ddgf/cli.hpp"

int main(int argc, char** argv) { return ddgf::run_cli(argc, argv); }
