#include <bhl/cli.hpp>

int main(int argc, char** argv) { return bhl::cli_main(argc, argv); }
