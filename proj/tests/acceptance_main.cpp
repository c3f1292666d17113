#include <cstdlib>
#include <iostream>

#include "ufb/acceptance.hpp"

int main() {
    bool all = true;
    for (const auto& r : ufb::run_acceptance()) {
        std::cout << ufb::format_line(r) << std::endl;
        all = all && r.pass;
    }
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
