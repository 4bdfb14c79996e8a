#include "eaclutch/cli/commands.hpp"

int main(int argc, char** argv) { return eaclutch::cli::run(argc, argv); }
