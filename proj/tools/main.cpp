#include "cli/commands.hpp"

int main(int argc, char** argv) { return pann::cli::run(argc, argv); }
