#include "commands.hpp"

int main(int argc, char** argv) { return homog::cli::run(argc, argv); }
