#include "hra/cli.hpp"

int main(int argc, char** argv) {
    return hra::cli_main(argc, argv);
}
