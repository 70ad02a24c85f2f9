#include "stratcox/scan.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stratcox {

int default_worker_count() {
#ifdef _OPENMP
    return std::max(1, omp_get_max_threads());
#else
    return 1;
#endif
}

void validate(const ExecutionConfig& config) {
    if (config.chunk_size < 1) throw validation_error("chunk_size must be >= 1");
    if (config.worker_count < 1) throw validation_error("worker_count must be >= 1");
}

namespace detail {

void run_chunks(const ChunkPlan& plan, int worker_count, void* ctx,
                void (*body)(void*, std::int64_t)) {
    const std::int64_t count = plan.count;
#ifdef _OPENMP
    const int threads = static_cast<int>(std::min<std::int64_t>(worker_count, count));
    if (threads > 1) {
#pragma omp parallel for schedule(static) num_threads(threads)
        for (std::int64_t c = 0; c < count; ++c) body(ctx, c);
        return;
    }
#else
    (void)worker_count;
#endif
    for (std::int64_t c = 0; c < count; ++c) body(ctx, c);
}

namespace {

constexpr std::int64_t kNoBadIndex = std::numeric_limits<std::int64_t>::max();

void record_bad_index(std::atomic<std::int64_t>& slot, std::int64_t i) {
    std::int64_t seen = slot.load(std::memory_order_relaxed);
    while (i < seen && !slot.compare_exchange_weak(seen, i, std::memory_order_relaxed)) {
    }
}

[[noreturn]] void throw_non_finite(std::int64_t i) {
    throw validation_error("non-finite input at index " + std::to_string(i));
}

}  // namespace
}  // namespace detail

void inclusive_scan(std::span<const double> values, std::span<double> out,
                    const ExecutionConfig& config, ScanCounters* counters) {
    if (values.empty()) throw validation_error("empty scan input");
    if (out.size() != values.size()) throw validation_error("scan output size mismatch");
    const auto plan = detail::plan_chunks(values.size(), config);

    std::vector<double> aggregate(plan.count);
    std::atomic<std::int64_t> bad{detail::kNoBadIndex};

    // Pass 1: serial scan of every chunk; aggregate is the chunk total.
    detail::for_each_chunk(plan, config.worker_count, [&](std::int64_t c) {
        const std::int64_t begin = c * plan.chunk;
        const std::int64_t end = std::min(plan.n, begin + plan.chunk);
        double run = 0.0;
        for (std::int64_t i = begin; i < end; ++i) {
            const double v = values[i];
            if (!std::isfinite(v)) {
                detail::record_bad_index(bad, i);
                return;
            }
            run += v;
            out[i] = run;
        }
        aggregate[c] = run;
    });
    if (bad.load() != detail::kNoBadIndex) detail::throw_non_finite(bad.load());

    // Pass 2: exclusive fold of chunk aggregates, in chunk order.
    std::vector<double> carry(plan.count);
    double run = 0.0;
    for (std::int64_t c = 0; c < plan.count; ++c) {
        carry[c] = run;
        run += aggregate[c];
    }

    // Pass 3: every chunk after the first absorbs its carry.
    detail::for_each_chunk(plan, config.worker_count, [&](std::int64_t c) {
        if (c == 0) return;
        const std::int64_t begin = c * plan.chunk;
        const std::int64_t end = std::min(plan.n, begin + plan.chunk);
        const double offset = carry[c];
        for (std::int64_t i = begin; i < end; ++i) out[i] += offset;
    });

    if (counters) {
        const std::uint64_t first_len =
            static_cast<std::uint64_t>(std::min(plan.n, plan.chunk));
        counters->elements.fetch_add(plan.n, std::memory_order_relaxed);
        counters->combines.fetch_add((plan.n - plan.count) + (plan.count - 1) +
                                         (plan.n - first_len),
                                     std::memory_order_relaxed);
    }
}

std::vector<double> inclusive_scan(std::span<const double> values, const ExecutionConfig& config,
                                   ScanCounters* counters) {
    std::vector<double> out(values.size());
    inclusive_scan(values, out, config, counters);
    return out;
}

void segmented_inclusive_scan(std::span<const double> values,
                              std::span<const std::uint8_t> flags, std::span<double> out,
                              const ExecutionConfig& config, ScanCounters* counters) {
    if (values.empty()) throw validation_error("empty scan input");
    if (flags.size() != values.size())
        throw validation_error("values and flags must have equal length");
    if (out.size() != values.size()) throw validation_error("scan output size mismatch");
    if (!flags[0]) throw validation_error("first element must head a segment");
    const auto plan = detail::plan_chunks(values.size(), config);

    // Per-chunk fold state: the pair aggregate plus the offset of the first
    // head inside the chunk (chunk length if it has none).
    std::vector<FlagValuePair> aggregate(plan.count);
    std::vector<std::int64_t> first_head(plan.count);
    std::atomic<std::int64_t> bad{detail::kNoBadIndex};

    detail::for_each_chunk(plan, config.worker_count, [&](std::int64_t c) {
        const std::int64_t begin = c * plan.chunk;
        const std::int64_t end = std::min(plan.n, begin + plan.chunk);
        const std::int64_t length = end - begin;
        double run = 0.0;
        std::int64_t head = length;
        for (std::int64_t i = begin; i < end; ++i) {
            const double v = values[i];
            if (!std::isfinite(v)) {
                detail::record_bad_index(bad, i);
                return;
            }
            // combine(run, {f, v}) written as a multiplicative select: a head
            // weight of 0 restarts the running sum exactly at v. The weight is
            // exact for 0/1 flags, and unlike a data-dependent branch it keeps
            // runtime independent of the head pattern.
            const int f = flags[i] != 0;
            if (head == length && f) head = i - begin;
            run = run * static_cast<double>(1 - f) + v;
            out[i] = run;
        }
        aggregate[c] = FlagValuePair{head < length ? std::uint8_t{1} : std::uint8_t{0}, run};
        first_head[c] = head;
    });
    if (bad.load() != detail::kNoBadIndex) detail::throw_non_finite(bad.load());

    std::vector<double> carry(plan.count);
    FlagValuePair run{0, 0.0};
    for (std::int64_t c = 0; c < plan.count; ++c) {
        carry[c] = run.value;
        run = combine(run, aggregate[c]);
    }

    // Only positions left of a chunk's first head still belong to a segment
    // that started in an earlier chunk; they absorb the carry value.
    std::uint64_t fixup_adds = 0;
    detail::for_each_chunk(plan, config.worker_count, [&](std::int64_t c) {
        if (c == 0) return;
        const std::int64_t begin = c * plan.chunk;
        const std::int64_t stop = begin + first_head[c];
        const double offset = carry[c];
        for (std::int64_t i = begin; i < stop; ++i) out[i] += offset;
    });
    if (counters) {
        for (std::int64_t c = 1; c < plan.count; ++c)
            fixup_adds += static_cast<std::uint64_t>(first_head[c]);
        counters->elements.fetch_add(plan.n, std::memory_order_relaxed);
        counters->combines.fetch_add((plan.n - plan.count) + (plan.count - 1) + fixup_adds,
                                     std::memory_order_relaxed);
    }
}

std::vector<double> segmented_inclusive_scan(std::span<const double> values,
                                             std::span<const std::uint8_t> flags,
                                             const ExecutionConfig& config,
                                             ScanCounters* counters) {
    std::vector<double> out(values.size());
    segmented_inclusive_scan(values, flags, out, config, counters);
    return out;
}

double chunked_sum(std::span<const double> values, const ExecutionConfig& config,
                   ScanCounters* counters) {
    return chunked_transform_sum(
        values.size(), [&](std::size_t i) { return values[i]; }, config, counters);
}

}  // namespace stratcox
