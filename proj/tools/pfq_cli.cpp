#include "pfq/cli.hpp"

int main(int argc, char** argv) { return pfq::run_cli(argc, argv); }
