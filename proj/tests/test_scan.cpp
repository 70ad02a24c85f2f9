#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "stratcox/scan.hpp"

#include "oracles.hpp"

using namespace stratcox;

namespace {

std::vector<std::uint8_t> random_flags(std::mt19937_64& rng, std::size_t n,
                                       std::size_t segments) {
    std::vector<std::uint8_t> flags(n, 0);
    flags[0] = 1;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 1; s < segments; ++s) flags[pick(rng)] = 1;
    return flags;
}

}  // namespace

TEST_CASE("flag-value combine is associative") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> real(-10.0, 10.0);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> integer(-50, 50);
    for (int trial = 0; trial < 2000; ++trial) {
        const bool integral = trial % 2 == 0;
        auto draw = [&]() {
            return FlagValuePair{static_cast<std::uint8_t>(coin(rng)),
                                 integral ? static_cast<double>(integer(rng)) : real(rng)};
        };
        const FlagValuePair a = draw(), b = draw(), c = draw();
        const FlagValuePair left = combine(combine(a, b), c);
        const FlagValuePair right = combine(a, combine(b, c));
        CHECK(left.flag == right.flag);
        if (integral)
            CHECK(left.value == right.value);
        else
            CHECK(oracles::close_rel(left.value, right.value, 1e-12));
    }
}

TEST_CASE("inclusive scan examples") {
    CHECK(inclusive_scan(std::vector<double>{1.0}) == std::vector<double>{1.0});
    const std::vector<double> input{3, 1, 7, 0, 4, 1, 6, 3};
    CHECK(inclusive_scan(input) == std::vector<double>{3, 4, 11, 11, 15, 16, 22, 25});
    CHECK(inclusive_scan(std::vector<double>{0, 0, 0, 0}) == std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("segmented scan reproduces the worked example exactly") {
    const std::vector<double> values{3, 1, 7, 0, 4, 1, 6, 3};
    const std::vector<std::uint8_t> flags{1, 0, 1, 0, 0, 1, 0, 0};
    const std::vector<double> expected{3, 4, 7, 7, 11, 1, 7, 10};
    for (const std::size_t chunk : {1UL, 2UL, 3UL, 8UL, 4096UL}) {
        ExecutionConfig config{chunk, 2};
        CHECK(segmented_inclusive_scan(values, flags, config) == expected);
    }
}

TEST_CASE("segmented scan trivial shapes") {
    const std::vector<double> singles{5, 2, 9};
    const std::vector<std::uint8_t> all_heads{1, 1, 1};
    CHECK(segmented_inclusive_scan(singles, all_heads) == singles);

    const std::vector<double> twos{2, 2, 2, 2};
    const std::vector<std::uint8_t> one_head{1, 0, 0, 0};
    CHECK(segmented_inclusive_scan(twos, one_head) == std::vector<double>{2, 4, 6, 8});
}

TEST_CASE("scan input validation") {
    CHECK_THROWS_WITH_AS(inclusive_scan(std::vector<double>{}), "empty scan input",
                         validation_error);
    CHECK_THROWS_WITH_AS(inclusive_scan(std::vector<double>{1.0, std::nan(""), 2.0}),
                         "non-finite input at index 1", validation_error);
    const std::vector<double> values{1, 2, 3};
    CHECK_THROWS_AS(segmented_inclusive_scan(values, std::vector<std::uint8_t>{1, 0}),
                    validation_error);
    CHECK_THROWS_WITH_AS(segmented_inclusive_scan(values, std::vector<std::uint8_t>{0, 0, 1}),
                         "first element must head a segment", validation_error);
}

TEST_CASE("segmented scan matches per-segment folds on random instances") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::uniform_int_distribution<int> small_int(0, 9);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(
                                      std::pow(10.0, uniform(rng) * 4.0));  // up to ~1e4
        const bool integral = trial % 3 == 0;
        std::vector<double> values(n);
        for (auto& v : values)
            v = integral ? static_cast<double>(small_int(rng)) : uniform(rng);
        const std::size_t segments =
            1 + static_cast<std::size_t>(uniform(rng) * static_cast<double>(n - 1));
        const auto flags = random_flags(rng, n, segments);

        ExecutionConfig config;
        config.chunk_size = 1 + static_cast<std::size_t>(uniform(rng) * 300.0);
        config.worker_count = 1 + static_cast<int>(uniform(rng) * 4.0);
        const auto got = segmented_inclusive_scan(values, flags, config);
        const auto want = oracles::per_segment_scan(values, flags);
        for (std::size_t i = 0; i < n; ++i) {
            if (integral)
                CHECK(got[i] == want[i]);
            else
                CHECK(oracles::close_rel(got[i], want[i], 1e-12));
        }
    }
}

TEST_CASE("scan output bits do not depend on worker count") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> values(30001);
    for (auto& v : values) v = uniform(rng);
    auto flags = random_flags(rng, values.size(), 64);

    for (const std::size_t chunk : {64UL, 4096UL}) {
        std::vector<std::vector<double>> plain, segmented;
        for (const int workers : {1, 2, 8}) {
            ExecutionConfig config{chunk, workers};
            plain.push_back(inclusive_scan(values, config));
            segmented.push_back(segmented_inclusive_scan(values, flags, config));
        }
        for (std::size_t w = 1; w < plain.size(); ++w) {
            CHECK(std::memcmp(plain[0].data(), plain[w].data(),
                              values.size() * sizeof(double)) == 0);
            CHECK(std::memcmp(segmented[0].data(), segmented[w].data(),
                              values.size() * sizeof(double)) == 0);
        }
    }
    // Repeated runs are bit-identical too.
    ExecutionConfig config{512, 4};
    const auto first = segmented_inclusive_scan(values, flags, config);
    const auto second = segmented_inclusive_scan(values, flags, config);
    CHECK(std::memcmp(first.data(), second.data(), values.size() * sizeof(double)) == 0);
}

TEST_CASE("scans are work-efficient") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const std::size_t n = 100000;
    std::vector<double> values(n);
    for (auto& v : values) v = uniform(rng);

    for (const std::size_t segments : {1UL, n / 100, n / 2, n}) {
        auto flags = random_flags(rng, n, segments);
        ScanCounters counters;
        segmented_inclusive_scan(values, flags, ExecutionConfig{1024, 4}, &counters);
        CHECK(counters.combine_count() <= 4 * n);
        CHECK(counters.element_count() == n);
    }
    ScanCounters counters;
    inclusive_scan(values, ExecutionConfig{1024, 4}, &counters);
    CHECK(counters.combine_count() <= 4 * n);
}

TEST_CASE("chunked sum is deterministic and matches the fold") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> values(12345);
    for (auto& v : values) v = uniform(rng);
    double fold = 0.0;
    for (const double v : values) fold += v;

    const double a = chunked_sum(values, ExecutionConfig{256, 1});
    const double b = chunked_sum(values, ExecutionConfig{256, 8});
    CHECK(a == b);
    CHECK(oracles::close_rel(a, fold, 1e-12));

    const auto [s1, s2] = chunked_transform_sum2(
        values.size(),
        [&](std::size_t i) { return std::pair<double, double>(values[i], 2.0 * values[i]); },
        ExecutionConfig{256, 4});
    CHECK(oracles::close_rel(s1, fold, 1e-12));
    CHECK(oracles::close_rel(s2, 2.0 * fold, 1e-12));
}

TEST_CASE("execution config validation") {
    CHECK_THROWS_AS(inclusive_scan(std::vector<double>{1.0}, ExecutionConfig{0, 1}),
                    validation_error);
    CHECK_THROWS_AS(inclusive_scan(std::vector<double>{1.0}, ExecutionConfig{8, 0}),
                    validation_error);
}
