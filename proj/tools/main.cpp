#include "ebrisk/cli.hpp"

int main(int argc, char** argv) { return ebrisk::run_cli(argc, argv); }
