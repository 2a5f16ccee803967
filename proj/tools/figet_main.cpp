#include "figet/cli.hpp"

int main(int argc, char** argv) { return figet::cli::dispatch(argc, argv); }
