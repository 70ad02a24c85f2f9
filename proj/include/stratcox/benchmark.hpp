#pragma once

// Runtime-per-iteration measurements of a CCD coordinate update under the
// scan evaluator and the naive risk-set double loop, across sample sizes and
// strata counts. Timing covers the iteration loop only; simulation and
// sorting are excluded.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stratcox/scan.hpp"

namespace stratcox {

struct BenchmarkConfig {
    std::vector<std::size_t> sizes{100000};
    std::vector<std::int32_t> strata{1, 100, 10000, 50000};
    std::vector<std::string> evaluators{"scan", "naive"};
    int repetitions = 5;
    std::size_t p = 100;
    double density = 0.05;
    double gamma = 1.4142135623730951;  // sqrt(2), the fixed benchmark penalty
    std::uint64_t seed = 42;
    int sweep = 0;  // coordinate updates per timed repetition; 0 = automatic
    ExecutionConfig exec{};
};

struct BenchmarkRow {
    std::size_t n = 0;
    std::size_t p = 0;
    std::int32_t k = 0;
    std::string evaluator;
    double seconds_per_iteration = 0.0;
    std::uint64_t combines_per_iteration = 0;
    std::uint64_t elements_per_iteration = 0;
    int repetitions = 0;
};

// progress, when given, receives one line per configuration.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config,
                                        std::ostream* progress = nullptr);

void write_benchmark_csv(const std::string& path, const std::vector<BenchmarkRow>& rows);

}  // namespace stratcox
