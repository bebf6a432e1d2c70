#include "anchormosaic/cli.hpp"

int main(int argc, char** argv) { return anchormosaic::cli::run_cli(argc, argv); }
