#include "episcale/cli.hpp"

int main(int argc, char** argv) { return episcale::cli::run_main(argc, argv); }
