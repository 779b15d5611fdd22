#include "rnlie/cli.hpp"

int main(int argc, char** argv) { return rnlie::run_cli(argc, argv); }
