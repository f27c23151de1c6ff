#include "mating/shell.hpp"

int main(int argc, char** argv) { return mating::cli_dispatch(argc, argv); }
