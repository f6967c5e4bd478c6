#include "gapesd/cli.hpp"

int main(int argc, char** argv) { return gapesd::cli::parse_and_dispatch(argc, argv); }
