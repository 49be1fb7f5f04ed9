#include "ecz/cli.hpp"

int main(int argc, char** argv) { return ecz::run_cli(argc, argv); }
