#include "adiaspec/cli.hpp"

int main(int argc, char** argv) { return adiaspec::cli::run(argc, argv); }
