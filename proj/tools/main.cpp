#include "mfsi/cli.hpp"

int main(int argc, char** argv) {
    return mfsi::run_cli(argc, argv);
}
