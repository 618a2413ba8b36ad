#include "driftstream/cli.hpp"

int main(int argc, char** argv) {
    return driftstream::cli::cli_main(argc, argv);
}
