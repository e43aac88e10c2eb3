#include "mfsteer/cli.hpp"

int main(int argc, char** argv) { return mfsteer::cli::run(argc, argv); }
