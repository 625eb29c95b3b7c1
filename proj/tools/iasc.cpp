#include "iasc/harness.hpp"

int main(int argc, char** argv) { return iasc::cli_main(argc, argv); }
