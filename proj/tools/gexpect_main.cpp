#include "gexpect/cli.hpp"

int main(int argc, char** argv) { return gexpect::run_cli(argc, argv); }
