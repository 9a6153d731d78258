#include "jstrack/cli.hpp"

int main(int argc, char** argv) { return jstrack::cli::run(argc, argv); }
