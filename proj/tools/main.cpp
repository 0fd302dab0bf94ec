#include "carinfo/cli.hpp"

int main(int argc, char** argv) { return carinfo::run_cli(argc, argv); }
