#include "ifl/cli.hpp"

int main(int argc, char** argv) { return ifl::cli_dispatch(argc, argv); }
