#include "rtslab/cli.hpp"

int main(int argc, char** argv) {
    return rtslab::cli::run(argc, argv);
}
