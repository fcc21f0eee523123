#include "cli.hpp"

int main(int argc, char** argv) { return tvrec::cli::run(argc, argv); }
