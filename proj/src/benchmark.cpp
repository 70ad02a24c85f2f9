#include "stratcox/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <new>
#include <ostream>

#include "stratcox/io.hpp"
#include "stratcox/likelihood.hpp"
#include "stratcox/optimizer.hpp"
#include "stratcox/simulate.hpp"

namespace stratcox {

namespace {

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// One CCD coordinate update: gradient/Hessian under the chosen evaluator,
// penalized proposal, trust clipping, cache update.
void run_iteration(const SortedDesign& design, CoefficientState& state, ScanWorkspace& workspace,
                   std::vector<double>& trust, const PenaltySpec& penalty,
                   const ExecutionConfig& exec, std::size_t j, bool naive,
                   ScanCounters* counters) {
    GradHess gh{0.0, 0.0};
    if (design.data.columns[j].nnz() > 0) {
        gh = naive ? naive_gradient_hessian(design, state, j)
                   : gradient_hessian(design, state, j, workspace, exec, counters);
    }
    const ProposedStep proposal =
        l1_coordinate_update(gh.gradient, gh.hessian, state.beta[j], penalty.gamma[j]);
    const TrustOutcome outcome = apply_trust_region(proposal.step, trust[j]);
    trust[j] = outcome.next_trust;
    if (outcome.applied != 0.0) update_xbeta(design, state, j, outcome.applied);
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config, std::ostream* progress) {
    if (config.repetitions < 1) throw validation_error("repetitions must be >= 1");
    using clock = std::chrono::steady_clock;
    std::vector<BenchmarkRow> rows;

    for (const std::size_t n : config.sizes) {
        for (const std::int32_t k : config.strata) {
            if (static_cast<std::size_t>(k) > n) {
                if (progress) *progress << "skipping n=" << n << " k=" << k << " (k > n)\n";
                continue;
            }
            try {
                SimulateConfig sim;
                sim.n = n;
                sim.p = config.p;
                sim.density = config.density;
                sim.strata = k;
                sim.seed = config.seed + static_cast<std::uint64_t>(k) * 1000003ULL + n;
                const Simulated simulated = simulate(sim);
                const SortedDesign design = build_sorted_design(simulated.data);
                const PenaltySpec penalty = PenaltySpec::shared(config.p, config.gamma);

                for (const std::string& evaluator : config.evaluators) {
                    if (evaluator != "scan" && evaluator != "naive")
                        throw validation_error("unknown evaluator '" + evaluator + "'");
                    const bool naive = evaluator == "naive";
                    int sweep = config.sweep;
                    if (sweep < 1) sweep = naive ? 1 : static_cast<int>(std::min<std::size_t>(config.p, 32));

                    CoefficientState state =
                        make_state(design, std::vector<double>(config.p, 0.0));
                    ScanWorkspace workspace;
                    std::vector<double> trust(config.p, 1.0);
                    ScanCounters counters;
                    std::size_t coordinate = 0;

                    // One untimed warm-up pass to fault in buffers.
                    run_iteration(design, state, workspace, trust, penalty, config.exec,
                                  coordinate, naive, nullptr);
                    coordinate = (coordinate + 1) % config.p;

                    counters.reset();
                    std::vector<double> samples;
                    samples.reserve(static_cast<std::size_t>(config.repetitions));
                    for (int rep = 0; rep < config.repetitions; ++rep) {
                        const auto start = clock::now();
                        for (int it = 0; it < sweep; ++it) {
                            run_iteration(design, state, workspace, trust, penalty, config.exec,
                                          coordinate, naive, &counters);
                            coordinate = (coordinate + 1) % config.p;
                        }
                        const std::chrono::duration<double> elapsed = clock::now() - start;
                        samples.push_back(elapsed.count() / sweep);
                    }

                    BenchmarkRow row;
                    row.n = n;
                    row.p = config.p;
                    row.k = k;
                    row.evaluator = evaluator;
                    row.seconds_per_iteration = median(samples);
                    const std::uint64_t iterations =
                        static_cast<std::uint64_t>(config.repetitions) *
                        static_cast<std::uint64_t>(sweep);
                    row.combines_per_iteration = counters.combine_count() / iterations;
                    row.elements_per_iteration = counters.element_count() / iterations;
                    row.repetitions = config.repetitions;
                    rows.push_back(row);
                    if (progress) {
                        *progress << "n=" << n << " k=" << k << " evaluator=" << evaluator
                                  << " seconds_per_iteration=" << row.seconds_per_iteration
                                  << "\n";
                        progress->flush();
                    }
                }
            } catch (const std::bad_alloc&) {
                if (progress)
                    *progress << "skipping n=" << n << " k=" << k << " (out of memory)\n";
            }
        }
    }
    return rows;
}

void write_benchmark_csv(const std::string& path, const std::vector<BenchmarkRow>& rows) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write " + path);
    out << "n,p,k,evaluator,seconds_per_iteration,combines_per_iteration,elements_per_iteration,"
           "repetitions\n";
    for (const auto& row : rows) {
        out << row.n << ',' << row.p << ',' << row.k << ',' << row.evaluator << ','
            << format_double(row.seconds_per_iteration) << ',' << row.combines_per_iteration
            << ',' << row.elements_per_iteration << ',' << row.repetitions << '\n';
    }
}

}  // namespace stratcox
