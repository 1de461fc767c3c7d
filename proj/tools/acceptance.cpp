#include <iostream>

#include "colsafe/verify.hpp"

int main() {
    const auto results = colsafe::verify::run_all(std::cout);
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
