// Acceptance suite: runs every verification criterion at its stated
// tolerance and prints one pass/fail line per criterion.

#include <iostream>

#include "eigenbound/verify.hpp"

int main() {
    const auto results = eigenbound::verify::run({});
    eigenbound::verify::print_report(std::cout, results, /*with_timing=*/true);
    return eigenbound::verify::all_passed(results) ? 0 : 1;
}
