#include <chrono>
#include <cstdio>
#include <iostream>

#include "commsim/selfcheck.hpp"

// Runs the eight acceptance criteria and prints one PASS/FAIL line each.
// Exit code is the number of failed criteria.
int main() {
    using clock = std::chrono::steady_clock;
    const int threads = commsim::resolve_threads(0);
    std::cerr << "acceptance: running the full criteria battery (threads=" << threads << ")\n";
    const auto t0 = clock::now();
    const auto results = commsim::run_full_checks(threads, &std::cerr, ".");
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();

    int failures = 0;
    for (const auto& r : results) {
        std::printf("[%s] %d %-22s %s\n", r.pass ? "PASS" : "FAIL", r.index, r.name.c_str(), r.details.c_str());
        failures += r.pass ? 0 : 1;
    }
    std::fflush(stdout);
    std::cerr << "acceptance: " << (results.size() - failures) << "/" << results.size() << " criteria passed in "
              << (int)secs << "s\n";
    return failures;
}
