#include "ile/harness.hpp"

int main(int argc, char** argv) { return ile::cli(argc, argv); }
