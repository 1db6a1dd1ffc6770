#include "dovetail/cli.hpp"

int main(int argc, char** argv) { return dovetail::cli::run(argc, argv); }
