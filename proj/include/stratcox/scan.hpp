#pragma once

// Inclusive and segmented inclusive scans over doubles, plus deterministic
// chunked reductions. These are the primitives under every partial-likelihood
// evaluation: risk-set sums within strata are segmented prefix sums once the
// rows are sorted stratum-major by decreasing time.
//
// All operations use a chunked reduce-then-scan schedule: each chunk is folded
// serially, the chunk aggregates are folded serially in chunk order, and a
// fix-up pass combines every chunk with the carry from its left. Worker count
// only decides which threads execute which chunks, so output bits depend on
// chunk_size alone.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stratcox/errors.hpp"

namespace stratcox {

int default_worker_count();

struct ExecutionConfig {
    std::size_t chunk_size = 4096;
    int worker_count = default_worker_count();
};

void validate(const ExecutionConfig& config);

// Element of a segmented scan after lifting: a segment-head flag paired with
// the running value. The combine below is associative, which is what lets the
// segmented scan run as one un-segmented scan over pairs.
struct FlagValuePair {
    std::uint8_t flag = 0;
    double value = 0.0;
};

inline FlagValuePair combine(FlagValuePair a, FlagValuePair b) {
    return {static_cast<std::uint8_t>(a.flag | b.flag),
            b.flag ? b.value : a.value + b.value};
}

// Instrumentation hook: counts binary combines and elements touched. Used by
// the work-efficiency tests and the benchmark report. Counts are exact and
// deterministic; accumulation order is not.
struct ScanCounters {
    std::atomic<std::uint64_t> combines{0};
    std::atomic<std::uint64_t> elements{0};

    void reset() {
        combines.store(0, std::memory_order_relaxed);
        elements.store(0, std::memory_order_relaxed);
    }
    std::uint64_t combine_count() const { return combines.load(std::memory_order_relaxed); }
    std::uint64_t element_count() const { return elements.load(std::memory_order_relaxed); }
};

// out[i] = values[0] + ... + values[i] under the chunked combine order.
// Throws validation_error on empty or non-finite input.
void inclusive_scan(std::span<const double> values, std::span<double> out,
                    const ExecutionConfig& config = {}, ScanCounters* counters = nullptr);
std::vector<double> inclusive_scan(std::span<const double> values,
                                   const ExecutionConfig& config = {},
                                   ScanCounters* counters = nullptr);

// Prefix sums restarting at every position with flags[i] = 1. flags[0] must
// be 1. Implemented by lifting to FlagValuePair and running the un-segmented
// schedule with the pair combine; cost does not depend on the segment count.
void segmented_inclusive_scan(std::span<const double> values,
                              std::span<const std::uint8_t> flags, std::span<double> out,
                              const ExecutionConfig& config = {},
                              ScanCounters* counters = nullptr);
std::vector<double> segmented_inclusive_scan(std::span<const double> values,
                                             std::span<const std::uint8_t> flags,
                                             const ExecutionConfig& config = {},
                                             ScanCounters* counters = nullptr);

// Deterministic sum: serial within chunks, chunk totals folded in order.
double chunked_sum(std::span<const double> values, const ExecutionConfig& config = {},
                   ScanCounters* counters = nullptr);

namespace detail {

struct ChunkPlan {
    std::int64_t n = 0;
    std::int64_t chunk = 1;
    std::int64_t count = 0;
};

inline ChunkPlan plan_chunks(std::size_t n, const ExecutionConfig& config) {
    validate(config);
    ChunkPlan plan;
    plan.n = static_cast<std::int64_t>(n);
    plan.chunk = static_cast<std::int64_t>(config.chunk_size);
    plan.count = plan.n == 0 ? 0 : (plan.n + plan.chunk - 1) / plan.chunk;
    return plan;
}

void run_chunks(const ChunkPlan& plan, int worker_count, void* ctx, void (*body)(void*, std::int64_t));

template <class Fn>
void for_each_chunk(const ChunkPlan& plan, int worker_count, Fn&& fn) {
    auto thunk = [](void* ctx, std::int64_t c) { (*static_cast<Fn*>(ctx))(c); };
    run_chunks(plan, worker_count, &fn, thunk);
}

}  // namespace detail

// Deterministic chunked reduction of fn(0) + ... + fn(n-1), and its two-output
// variant (both sums accumulated in one pass). fn must be safe to call from
// multiple threads.
template <class Fn>
std::pair<double, double> chunked_transform_sum2(std::size_t n, Fn fn,
                                                 const ExecutionConfig& config = {},
                                                 ScanCounters* counters = nullptr) {
    const auto plan = detail::plan_chunks(n, config);
    if (plan.count == 0) return {0.0, 0.0};
    std::vector<double> partial_a(plan.count), partial_b(plan.count);
    detail::for_each_chunk(plan, config.worker_count, [&](std::int64_t c) {
        const std::int64_t begin = c * plan.chunk;
        const std::int64_t end = std::min(plan.n, begin + plan.chunk);
        double sa = 0.0, sb = 0.0;
        for (std::int64_t i = begin; i < end; ++i) {
            auto [a, b] = fn(static_cast<std::size_t>(i));
            sa += a;
            sb += b;
        }
        partial_a[c] = sa;
        partial_b[c] = sb;
    });
    double ta = 0.0, tb = 0.0;
    for (std::int64_t c = 0; c < plan.count; ++c) {
        ta += partial_a[c];
        tb += partial_b[c];
    }
    if (counters) {
        counters->elements.fetch_add(static_cast<std::uint64_t>(plan.n), std::memory_order_relaxed);
        counters->combines.fetch_add(static_cast<std::uint64_t>(2 * plan.n), std::memory_order_relaxed);
    }
    return {ta, tb};
}

template <class Fn>
double chunked_transform_sum(std::size_t n, Fn fn, const ExecutionConfig& config = {},
                             ScanCounters* counters = nullptr) {
    auto [a, b] = chunked_transform_sum2(
        n, [&](std::size_t i) { return std::pair<double, double>(fn(i), 0.0); }, config, counters);
    (void)b;
    return a;
}

}  // namespace stratcox
