#include "stgam/cli.hpp"

int main(int argc, char** argv) { return stgam::run(argc, argv); }
