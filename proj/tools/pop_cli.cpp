#include "pop/cli.hpp"

int main(int argc, char** argv) { return pop::cli::run(argc, argv); }
