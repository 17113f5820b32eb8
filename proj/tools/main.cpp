#include "commands.hpp"

int main(int argc, char** argv) { return momlab::cli::run(argc, argv); }
