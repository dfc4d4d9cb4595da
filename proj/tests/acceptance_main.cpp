#include <iostream>

#include "ampere/acceptance.hpp"

int main() {
    const auto results = ampere::run_acceptance();
    std::cout << ampere::format_results(results);
    return ampere::all_passed(results) ? 0 : 1;
}
