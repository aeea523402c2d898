#include <vector>

#include "twingraph/cli.hpp"

int main(int argc, char** argv) {
    return twingraph::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
