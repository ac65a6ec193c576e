#include "dai/cli.hpp"

int main(int argc, char** argv) { return dai::cli::run(argc, argv); }
