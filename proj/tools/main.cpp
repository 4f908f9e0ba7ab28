#include "gwgl/cli.hpp"

int main(int argc, char** argv) { return gwgl::cli::run(argc, argv); }
