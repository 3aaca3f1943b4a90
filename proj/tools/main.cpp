#include <vector>

#include "ruaf/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ruaf::cli::run(args);
}
