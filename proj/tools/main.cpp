#include "cli/commands.hpp"

int main(int argc, char** argv) { return restorebench::cli::run(argc, argv); }
