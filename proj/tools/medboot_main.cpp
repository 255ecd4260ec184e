#include "medboot/cli.hpp"

int main(int argc, char** argv) { return medboot::run_cli(argc, argv); }
