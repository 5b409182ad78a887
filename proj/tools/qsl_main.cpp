#include "qsl/cli.hpp"

int main(int argc, char** argv) { return qsl::cli_main(argc, argv); }
