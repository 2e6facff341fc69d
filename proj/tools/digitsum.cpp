#include "digitsum/cli.hpp"

int main(int argc, char** argv) { return digitsum::cli::run(argc, argv); }
