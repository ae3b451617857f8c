#include "tvc/cli.hpp"

int main(int argc, char** argv) { return tvc::run_command(argc, argv); }
