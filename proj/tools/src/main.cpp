#include "anomaly_cli/cli.hpp"

int main(int argc, char** argv) { return anomaly::cli::run(argc, argv); }
