#include "qpbe/report.hpp"

int main(int argc, char** argv) { return qpbe::run_cli(argc, argv); }
