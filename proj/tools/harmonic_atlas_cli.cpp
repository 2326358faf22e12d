#include "harmonic_atlas/cli.hpp"

int main(int argc, char** argv) { return harmonic_atlas::cli::run(argc, argv); }
