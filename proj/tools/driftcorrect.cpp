#include "driftcorrect/cli.hpp"

int main(int argc, char** argv) {
    return driftcorrect::cli::run(argc, argv);
}
