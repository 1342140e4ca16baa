#include "trunclap/cli.hpp"

int main(int argc, char** argv) { return trunclap::cli::run(argc, argv); }
