#include "risopt/cli.hpp"

int main(int argc, char** argv) {
    return risopt::cli::main_entry(argc, argv);
}
