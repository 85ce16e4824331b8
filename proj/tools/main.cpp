#include "mandel/cli.hpp"

int main(int argc, char** argv) { return mandel::run_cli(argc, argv); }
