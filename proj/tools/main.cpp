#include "cli.hpp"

int main(int argc, char** argv) { return bmikit::cli::run(argc, argv); }
