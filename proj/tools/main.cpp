#include "cli.hpp"

int main(int argc, char** argv) { return delenox::cli::run(argc, argv); }
