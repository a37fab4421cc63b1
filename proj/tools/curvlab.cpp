#include "curvlab/cli.hpp"

int main(int argc, char** argv) {
    return curvlab::run_cli(argc, argv);
}
