/// @file kgflow_main.cpp
/// @brief Executable entry point.

#include "kgflow/cli.hpp"

int main(int argc, char** argv) { return kgflow::run_cli(argc, argv); }
