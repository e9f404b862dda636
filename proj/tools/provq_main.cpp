#include "provq/cli.hpp"

int main(int argc, char** argv) { return provq::run_cli(argc, argv); }
