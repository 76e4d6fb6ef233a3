#include "sgmtl/commands.hpp"

int main(int argc, char** argv) { return sgmtl::run_cli(argc, argv); }
