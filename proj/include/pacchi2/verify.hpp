#pragma once

#include <string>
#include <vector>

namespace pacchi2 {

struct GoldenCheck {
    std::string name;
    double computed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    // Non-fatal checks are reported but do not affect the exit status.
    bool fatal = true;
    std::string note;
};

// Published kl moment constants (m, maximizer, value).
struct PublishedKlConstant {
    int m;
    double maximizer;
    double value;
};
const std::vector<PublishedKlConstant>& published_kl_constants();

// strict_published makes the published kl-constant comparison fatal.
std::vector<GoldenCheck> run_golden_checks(bool strict_published = false);

}  // namespace pacchi2
