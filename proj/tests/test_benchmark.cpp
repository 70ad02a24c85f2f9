#include <doctest.h>

#include "stratcox/benchmark.hpp"

using namespace stratcox;

TEST_CASE("benchmark harness reports medians, counts, and both evaluators") {
    BenchmarkConfig config;
    config.sizes = {2000};
    config.strata = {1, 2000};
    config.evaluators = {"scan", "naive"};
    config.repetitions = 5;
    config.p = 4;
    config.density = 0.3;
    config.seed = 71;
    const auto rows = run_benchmark(config);
    REQUIRE(rows.size() == 4);

    double naive_k1 = 0.0, naive_kn = 0.0;
    for (const auto& row : rows) {
        CHECK(row.seconds_per_iteration > 0.0);
        CHECK(row.repetitions == 5);
        if (row.evaluator == "scan") CHECK(row.combines_per_iteration > 0);
        if (row.evaluator == "naive" && row.k == 1) naive_k1 = row.seconds_per_iteration;
        if (row.evaluator == "naive" && row.k == 2000) naive_kn = row.seconds_per_iteration;
    }
    // The naive evaluator's risk-set loops shrink as strata multiply: with one
    // row per stratum it beats its own single-stratum cost by a wide margin.
    CHECK(naive_kn < naive_k1);
}

TEST_CASE("single repetition reports the lone sample as the median") {
    BenchmarkConfig config;
    config.sizes = {500};
    config.strata = {1};
    config.evaluators = {"scan"};
    config.repetitions = 1;
    config.p = 2;
    config.density = 0.3;
    const auto rows = run_benchmark(config);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].seconds_per_iteration > 0.0);
    CHECK(rows[0].repetitions == 1);
}

TEST_CASE("benchmark rejects unknown evaluators and bad repetition counts") {
    BenchmarkConfig config;
    config.sizes = {100};
    config.strata = {1};
    config.evaluators = {"warp"};
    config.p = 2;
    CHECK_THROWS_AS(run_benchmark(config), validation_error);
    config.evaluators = {"scan"};
    config.repetitions = 0;
    CHECK_THROWS_AS(run_benchmark(config), validation_error);
}
