#include "sketchml/cli.hpp"

int main(int argc, char** argv) { return sketchml::cli_main(argc, argv); }
