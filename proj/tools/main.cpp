#include "cyclequeue/cli.hpp"

int main(int argc, char** argv) { return cq::cli::main(argc, argv); }
