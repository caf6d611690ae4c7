#include "commands.hpp"

int main(int argc, char** argv) { return anytrack::cli::run(argc, argv); }
