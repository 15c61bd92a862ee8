#pragma once

// The verification suite: one entry per acceptance criterion, runnable as a
// whole or as a subset.  Used by the `verify` CLI subcommand and by the
// acceptance test binary.

#include <iosfwd>
#include <string>
#include <vector>

namespace eigenbound::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double worst = 0;     // worst observed residual or disagreement
    double tolerance = 0; // the bound it is held against
    double seconds = 0;
    std::vector<std::string> notes;
};

struct Options {
    std::vector<int> criteria; // empty = all
    // Test hook: "weight-sign" corrupts the weight used by the duality check
    // so the suite demonstrably detects a broken weight.
    std::string inject_fault;
};

std::vector<CriterionResult> run(const Options& opts = {});

bool all_passed(const std::vector<CriterionResult>& results);

/// One line per criterion plus a RESULT line; timing is optional so reports
/// can be compared byte for byte.
void print_report(std::ostream& os, const std::vector<CriterionResult>& results,
                  bool with_timing);

} // namespace eigenbound::verify
