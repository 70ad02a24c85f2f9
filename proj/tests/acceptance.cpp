// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Every tolerance is pinned here; the binary exits with the failure count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stratcox/benchmark.hpp"
#include "stratcox/likelihood.hpp"
#include "stratcox/optimizer.hpp"
#include "stratcox/resample.hpp"
#include "stratcox/scan.hpp"
#include "stratcox/simulate.hpp"
#include "stratcox/transforms.hpp"

#include "oracles.hpp"
#include "reference_newton.hpp"

using namespace stratcox;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << name
              << " (" << detail << ")" << std::endl;
    if (!pass) ++failures;
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(3);
    out << v;
    return out.str();
}

// ---------------------------------------------------------------- criterion 1
void criterion_segmented_scan_oracle() {
    Timer timer;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::uniform_int_distribution<int> small_int(0, 9);

    bool pass = true;
    std::string detail;

    const std::vector<double> paper_values{3, 1, 7, 0, 4, 1, 6, 3};
    const std::vector<std::uint8_t> paper_flags{1, 0, 1, 0, 0, 1, 0, 0};
    const std::vector<double> paper_expected{3, 4, 7, 7, 11, 1, 7, 10};
    if (segmented_inclusive_scan(paper_values, paper_flags) != paper_expected) {
        pass = false;
        detail = "worked example mismatch";
    }

    const int instances = 10000;
    double max_rel = 0.0;
    for (int trial = 0; pass && trial < instances; ++trial) {
        const std::size_t n =
            1 + static_cast<std::size_t>(std::pow(10.0, uniform(rng) * 5.0));  // 1 .. 1e5
        const bool integral = trial % 4 == 0;
        std::vector<double> values(n);
        for (auto& v : values)
            v = integral ? static_cast<double>(small_int(rng)) : uniform(rng);
        std::vector<std::uint8_t> flags(n, 0);
        flags[0] = 1;
        const std::size_t segments = 1 + static_cast<std::size_t>(std::pow(
                                             static_cast<double>(n), uniform(rng)));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t s = 1; s < segments && s < n; ++s) flags[pick(rng)] = 1;

        ExecutionConfig config;
        config.chunk_size = trial % 3 == 0 ? 64 : 4096;
        config.worker_count = 1 + trial % 4;
        const auto got = segmented_inclusive_scan(values, flags, config);
        const auto want = oracles::per_segment_scan(values, flags);
        for (std::size_t i = 0; i < n; ++i) {
            if (integral) {
                if (got[i] != want[i]) {
                    pass = false;
                    detail = "integer instance mismatch at trial " + std::to_string(trial);
                    break;
                }
            } else {
                const double scale = std::max({1.0, std::abs(got[i]), std::abs(want[i])});
                const double rel = std::abs(got[i] - want[i]) / scale;
                max_rel = std::max(max_rel, rel);
                if (rel > 1e-12) {
                    pass = false;
                    detail = "relative error " + fmt(rel) + " at trial " + std::to_string(trial);
                    break;
                }
            }
        }
    }
    const double elapsed = timer.seconds();
    if (pass && elapsed >= 60.0) {
        pass = false;
        detail = "runtime " + fmt(elapsed) + " s exceeds 60 s";
    }
    if (pass)
        detail = std::to_string(instances) + " instances, max rel err " + fmt(max_rel) + ", " +
                 fmt(elapsed) + " s";
    report(1, "segmented-scan oracle", pass, detail);
}

// ---------------------------------------------------------------- criterion 2
void criterion_gradient_equivalence() {
    Timer timer;
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 0.5);
    ScanWorkspace workspace;

    bool pass = true;
    std::string detail;
    double max_rel = 0.0;
    const int instances = 1000;
    const std::int32_t strata_grid[3] = {1, 5, 50};
    for (int trial = 0; pass && trial < instances; ++trial) {
        const std::size_t n = 50 + static_cast<std::size_t>(uniform(rng) * 151.0);  // 50..200
        const std::int32_t k = strata_grid[trial % 3];
        const std::size_t p = 1 + static_cast<std::size_t>(uniform(rng) * 10.0);
        const auto data = oracles::random_dataset(rng, n, k, p);
        const auto design = build_sorted_design(data);
        std::vector<double> beta(p);
        for (auto& b : beta) b = normal(rng);
        const auto state = make_state(design, beta);
        ExecutionConfig config{1 + static_cast<std::size_t>(trial % 128), 1 + trial % 3};
        for (std::size_t j = 0; j < p; ++j) {
            const auto fast = gradient_hessian(design, state, j, workspace, config);
            const auto slow = naive_gradient_hessian(design, state, j);
            const double rel_g = std::abs(fast.gradient - slow.gradient) /
                                 std::max({1.0, std::abs(fast.gradient), std::abs(slow.gradient)});
            const double rel_h = std::abs(fast.hessian - slow.hessian) /
                                 std::max({1.0, std::abs(fast.hessian), std::abs(slow.hessian)});
            max_rel = std::max({max_rel, rel_g, rel_h});
            if (rel_g > 1e-10 || rel_h > 1e-10) {
                pass = false;
                detail = "trial " + std::to_string(trial) + " rel err " + fmt(std::max(rel_g, rel_h));
                break;
            }
        }
    }
    const double elapsed = timer.seconds();
    if (pass && elapsed >= 300.0) {
        pass = false;
        detail = "runtime " + fmt(elapsed) + " s exceeds 5 min";
    }
    if (pass)
        detail = std::to_string(instances) + " instances, max rel err " + fmt(max_rel) + ", " +
                 fmt(elapsed) + " s";
    report(2, "scan vs naive gradient/Hessian", pass, detail);
}

// ---------------------------------------------------------------- criterion 3
void criterion_finite_differences() {
    Timer timer;
    std::mt19937_64 rng(303);
    std::normal_distribution<double> normal(0.0, 0.4);
    ScanWorkspace workspace;

    bool pass = true;
    std::string detail;
    double max_rel_g = 0.0, max_rel_h = 0.0;
    for (int trial = 0; pass && trial < 100; ++trial) {
        const std::size_t p = 1 + trial % 4;
        const auto data = oracles::random_dataset(rng, 30 + trial % 30, 1 + trial % 3, p);
        const auto design = build_sorted_design(data);
        std::vector<double> beta(p);
        for (auto& b : beta) b = normal(rng);
        const std::size_t j = trial % p;
        const auto gh = gradient_hessian(design, make_state(design, beta), j, workspace);

        auto objective_at = [&](double bj) {
            auto shifted = beta;
            shifted[j] = bj;
            return -log_partial_likelihood(design, make_state(design, shifted));
        };
        const double h1 = 1e-5 * std::max(1.0, std::abs(beta[j]));
        const double fd_g = (objective_at(beta[j] + h1) - objective_at(beta[j] - h1)) / (2 * h1);
        const double rel_g = std::abs(gh.gradient - fd_g) /
                             std::max({1.0, std::abs(gh.gradient), std::abs(fd_g)});

        const double h2 = 1e-4 * std::max(1.0, std::abs(beta[j]));
        const double fd_h = (objective_at(beta[j] + h2) - 2 * objective_at(beta[j]) +
                             objective_at(beta[j] - h2)) /
                            (h2 * h2);
        const double rel_h =
            std::abs(gh.hessian - fd_h) / std::max({1.0, std::abs(gh.hessian), std::abs(fd_h)});
        max_rel_g = std::max(max_rel_g, rel_g);
        max_rel_h = std::max(max_rel_h, rel_h);
        if (rel_g > 1e-6 || rel_h > 1e-4) {
            pass = false;
            detail = "trial " + std::to_string(trial) + ": grad rel " + fmt(rel_g) +
                     ", hess rel " + fmt(rel_h);
        }
    }
    if (pass)
        detail = "100 instances, grad rel " + fmt(max_rel_g) + ", hess rel " + fmt(max_rel_h) +
                 ", " + fmt(timer.seconds()) + " s";
    report(3, "finite-difference check", pass, detail);
}

// ---------------------------------------------------------------- criterion 4
TimeVaryingDataset random_time_varying(std::mt19937_64& rng, std::size_t n, std::size_t intervals,
                                       std::size_t p) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> cuts{0.0};
    for (std::size_t k = 0; k < intervals; ++k)
        cuts.push_back(cuts.back() + 1.0 + std::floor(uniform(rng) * 3.0));

    TimeVaryingDataset data;
    data.cut_points = cuts;
    data.time.resize(n);
    data.event.resize(n);
    data.subject.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        data.event[i] = uniform(rng) < 0.7 ? 1 : 0;
        double t = uniform(rng) * cuts.back();
        if (data.event[i] && uniform(rng) < 0.25) {
            t = cuts[1 + static_cast<std::size_t>(uniform(rng) *
                                                  static_cast<double>(cuts.size() - 1))];
        } else if (!data.event[i]) {
            for (const double c : cuts)
                if (t == c) t += 0.25;  // censoring exactly on a cut is out of contract
        }
        data.time[i] = std::min(t, cuts.back());
        data.subject[i] = static_cast<std::int64_t>(i + 1);
    }
    data.event[0] = 1;
    data.covariates.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        data.covariates[j].name = "x" + std::to_string(j + 1);
        data.covariates[j].by_interval.resize(intervals);
        for (std::size_t k = 1; k <= intervals; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!at_risk_in_interval(data.time[i], data.event[i], static_cast<int>(k), cuts))
                    continue;
                if (uniform(rng) < 0.5) continue;
                const double value = uniform(rng) * 2.0 - 1.0;
                if (value != 0.0)
                    data.covariates[j].by_interval[k - 1].push(static_cast<std::int64_t>(i),
                                                               value);
            }
        }
    }
    return data;
}

void criterion_transform_equivalence() {
    Timer timer;
    std::mt19937_64 rng(404);
    std::normal_distribution<double> normal(0.0, 0.6);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    bool pass = true;
    std::string detail;
    double max_rel = 0.0;
    for (int trial = 0; pass && trial < 100; ++trial) {
        const std::size_t p = 1 + trial % 3;
        const std::size_t intervals = 1 + trial % 4;
        const auto tvd = random_time_varying(rng, 10 + trial % 41, intervals, p);

        std::vector<double> beta(p);
        for (auto& b : beta) b = normal(rng);
        const auto aug = augment_to_strata(tvd);
        const auto design = build_sorted_design(aug);
        const double direct = time_varying_log_likelihood(tvd, beta);
        const double lowered = log_partial_likelihood(design, make_state(design, beta));
        const double rel =
            std::abs(direct - lowered) / std::max({1.0, std::abs(direct), std::abs(lowered)});
        max_rel = std::max(max_rel, rel);
        if (rel > 1e-12) {
            pass = false;
            detail = "trial " + std::to_string(trial) + " rel err " + fmt(rel);
            break;
        }

        if (intervals >= 2) {
            TimeVaryingSpec spec;
            spec.cut_points = tvd.cut_points;
            const std::size_t cut_index =
                1 + static_cast<std::size_t>(uniform(rng) * static_cast<double>(intervals - 1));
            spec.splits.push_back({0, {tvd.cut_points[cut_index]}});
            const auto lowered_split = lower_pipeline(tvd, spec);
            std::vector<double> beta_aug(lowered_split.data.n_covariates());
            for (const auto& entry : lowered_split.column_map)
                beta_aug[entry.column] = beta[entry.source];
            const auto split_design = build_sorted_design(lowered_split.data);
            const double with_split =
                log_partial_likelihood(split_design, make_state(split_design, beta_aug));
            const double rel_split = std::abs(with_split - lowered) /
                                     std::max({1.0, std::abs(with_split), std::abs(lowered)});
            max_rel = std::max(max_rel, rel_split);
            if (rel_split > 1e-12) {
                pass = false;
                detail = "split trial " + std::to_string(trial) + " rel err " + fmt(rel_split);
            }
        }
    }
    if (pass) detail = "100 instances, max rel err " + fmt(max_rel) + ", " + fmt(timer.seconds()) + " s";
    report(4, "time-varying lowering equivalence", pass, detail);
}

// ---------------------------------------------------------------- criterion 5
void criterion_optimizer_reference() {
    Timer timer;
    bool pass = true;
    std::string detail;
    double max_abs = 0.0;

    for (const std::int32_t k : {1, 10}) {
        SimulateConfig sim;
        sim.n = 2000;
        sim.p = 5;
        sim.density = 0.3;
        sim.beta_sparsity = 0.0;
        sim.strata = k;
        sim.censoring = 0.3;
        sim.seed = 500 + static_cast<std::uint64_t>(k);
        const auto simulated = simulate(sim);
        const auto design = build_sorted_design(simulated.data);

        OptimizerConfig config;
        config.tolerance = 1e-8;
        config.max_cycles = 5000;
        const auto ccd = ccd_fit(design, PenaltySpec::none(5), config);
        const auto reference = reference::newton_raphson(design);
        if (!ccd.converged || !reference.converged) {
            pass = false;
            detail = "fit did not converge at k=" + std::to_string(k);
            break;
        }
        for (std::size_t j = 0; j < 5; ++j)
            max_abs = std::max(max_abs, std::abs(ccd.beta[j] - reference.beta[j]));
        if (max_abs > 1e-4) {
            pass = false;
            detail = "max |ccd - newton| = " + fmt(max_abs) + " at k=" + std::to_string(k);
            break;
        }

        // Penalized KKT conditions at the shared gamma = 2 solution.
        const double gamma = 2.0;
        OptimizerConfig pen_config;
        pen_config.tolerance = 1e-7;
        pen_config.max_cycles = 5000;
        const auto penalized = ccd_fit(design, PenaltySpec::shared(5, gamma), pen_config);
        if (!penalized.converged) {
            pass = false;
            detail = "penalized fit did not converge at k=" + std::to_string(k);
            break;
        }
        const auto state = make_state(design, penalized.beta);
        ScanWorkspace workspace;
        for (std::size_t j = 0; j < 5; ++j) {
            const auto gh = gradient_hessian(design, state, j, workspace);
            if (penalized.beta[j] != 0.0) {
                const double stat = std::abs(gh.gradient + (penalized.beta[j] > 0 ? gamma : -gamma));
                if (stat > 10 * pen_config.tolerance * std::max(1.0, gh.hessian)) {
                    pass = false;
                    detail = "KKT stationarity " + fmt(stat) + " at j=" + std::to_string(j);
                }
            } else if (std::abs(gh.gradient) > gamma + 10 * pen_config.tolerance) {
                pass = false;
                detail = "KKT subgradient bound broken at j=" + std::to_string(j);
            }
        }
        if (!pass) break;
    }
    if (pass)
        detail = "k in {1,10}, max |ccd - newton| = " + fmt(max_abs) + ", KKT ok, " +
                 fmt(timer.seconds()) + " s";
    report(5, "optimizer vs full Newton-Raphson + KKT", pass, detail);
}

// ---------------------------------------------------------------- criterion 6
void criterion_scaling_shape() {
    Timer timer;
    bool pass = true;
    std::string detail;

    BenchmarkConfig config;
    config.sizes = {100000};
    config.strata = {1, 100, 10000, 50000};
    config.evaluators = {"scan"};
    config.repetitions = 5;
    config.p = 100;
    config.seed = 600;
    auto rows = run_benchmark(config, &std::cout);

    BenchmarkConfig naive_config = config;
    naive_config.strata = {1};
    naive_config.evaluators = {"naive"};
    const auto naive_rows = run_benchmark(naive_config, &std::cout);
    rows.insert(rows.end(), naive_rows.begin(), naive_rows.end());

    double scan_min = 1e300, scan_max = 0.0, scan_at_1 = 0.0, naive_at_1 = 0.0;
    for (const auto& row : rows) {
        if (row.evaluator == "scan") {
            scan_min = std::min(scan_min, row.seconds_per_iteration);
            scan_max = std::max(scan_max, row.seconds_per_iteration);
            if (row.k == 1) scan_at_1 = row.seconds_per_iteration;
        } else if (row.k == 1) {
            naive_at_1 = row.seconds_per_iteration;
        }
    }
    const double spread = scan_max / scan_min;
    const double speedup = naive_at_1 / scan_at_1;
    if (spread >= 2.0) {
        pass = false;
        detail = "scan spread across strata " + fmt(spread) + "x";
    }
    if (pass && speedup < 20.0) {
        pass = false;
        detail = "naive/scan speedup only " + fmt(speedup) + "x";
    }

    // Raw segmented-scan runtime must not depend on the segment count.
    double seg_min = 1e300, seg_max = 0.0;
    if (pass) {
        const std::size_t n = 2000000;
        std::mt19937_64 rng(601);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        std::vector<double> values(n);
        for (auto& v : values) v = uniform(rng);
        std::vector<double> out(n);
        for (const std::size_t segments : {std::size_t{1}, n / 100, n / 2, n}) {
            std::vector<std::uint8_t> flags(n, 0);
            flags[0] = 1;
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t s = 1; s < segments; ++s) flags[pick(rng)] = 1;
            std::vector<double> samples;
            segmented_inclusive_scan(values, flags, out);  // warm-up
            for (int rep = 0; rep < 5; ++rep) {
                Timer t;
                segmented_inclusive_scan(values, flags, out);
                samples.push_back(t.seconds());
            }
            std::sort(samples.begin(), samples.end());
            seg_min = std::min(seg_min, samples[2]);
            seg_max = std::max(seg_max, samples[2]);
        }
        if (seg_max / seg_min >= 2.0) {
            pass = false;
            detail = "segmented-scan spread " + fmt(seg_max / seg_min) + "x across segment counts";
        }
    }

    const double elapsed = timer.seconds();
    if (pass && elapsed >= 1800.0) {
        pass = false;
        detail = "benchmark took " + fmt(elapsed) + " s (budget 30 min)";
    }
    if (pass)
        detail = "scan spread " + fmt(spread) + "x, naive/scan " + fmt(speedup) +
                 "x, scan-primitive spread " + fmt(seg_max / seg_min) + "x, " + fmt(elapsed) + " s";
    report(6, "scaling shape at N=1e5", pass, detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_determinism() {
    Timer timer;
    bool pass = true;
    std::string detail;

    SimulateConfig sim;
    sim.n = 3000;
    sim.p = 8;
    sim.density = 0.2;
    sim.beta_sparsity = 0.25;
    sim.strata = 7;
    sim.seed = 700;
    const auto simulated = simulate(sim);
    const auto design = build_sorted_design(simulated.data);

    auto run = [&](int workers, double gamma) {
        OptimizerConfig config;
        config.exec.chunk_size = 1024;
        config.exec.worker_count = workers;
        return ccd_fit(design, PenaltySpec::shared(8, gamma), config);
    };

    for (const double gamma : {0.0, 1.0}) {
        const auto base = run(1, gamma);
        if (!base.converged) {
            pass = false;
            detail = "fit did not converge at gamma " + fmt(gamma);
            break;
        }
        for (std::size_t c = 1; c < base.objective_trace.size(); ++c) {
            if (base.objective_trace[c] > base.objective_trace[c - 1] + 1e-10) {
                pass = false;
                detail = "objective rose at cycle " + std::to_string(c);
            }
        }
        for (const int workers : {2, 8}) {
            const auto other = run(workers, gamma);
            if (std::memcmp(base.beta.data(), other.beta.data(),
                            base.beta.size() * sizeof(double)) != 0 ||
                base.objective_trace != other.objective_trace) {
                pass = false;
                detail = "workers=" + std::to_string(workers) + " changed the result bits";
            }
        }
        const auto repeat = run(1, gamma);
        if (repeat.beta != base.beta || repeat.objective_trace != base.objective_trace) {
            pass = false;
            detail = "repeated run differs";
        }
        if (!pass) break;
    }
    if (pass)
        detail = "beta and traces bit-identical across workers {1,2,8}, monotone traces, " +
                 fmt(timer.seconds()) + " s";
    report(7, "monotonicity and determinism", pass, detail);
}

// ---------------------------------------------------------------- criterion 8
void criterion_bootstrap_coverage() {
    Timer timer;
    bool pass = true;
    std::string detail;

    const double true_effect = std::log(0.8);
    const int repetitions = 50;
    int covered = 0;

    for (int rep = 0; rep < repetitions; ++rep) {
        std::mt19937_64 rng(800 + static_cast<std::uint64_t>(rep));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const std::size_t n = 10000;

        SurvivalDataset data;
        data.columns.resize(2);
        data.covariate_names = {"trt", "x2"};
        std::vector<double> eta(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (uniform(rng) < 0.5) {
                data.columns[0].push(static_cast<std::int64_t>(i), 1.0);
                eta[i] += true_effect;
            }
            if (uniform(rng) < 0.3) {
                data.columns[1].push(static_cast<std::int64_t>(i), 1.0);
                eta[i] += 0.5;
            }
        }
        std::vector<double> event_time(n);
        for (std::size_t i = 0; i < n; ++i)
            event_time[i] = -std::log(std::max(uniform(rng), 1e-300)) / std::exp(eta[i]);
        auto censored_fraction = [&](double cmax) {
            double total = 0.0;
            for (const double t : event_time) total += std::min(1.0, t / cmax);
            return total / static_cast<double>(n);
        };
        double lo = 1e-9, hi = 1.0;
        while (censored_fraction(hi) > 0.3) hi *= 2.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (censored_fraction(mid) > 0.3 ? lo : hi) = mid;
        }
        data.time.resize(n);
        data.event.resize(n);
        data.stratum.assign(n, 1);
        data.subject.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double c = uniform(rng) * hi;
            data.time[i] = std::min(event_time[i], c);
            data.event[i] = event_time[i] <= c ? 1 : 0;
            data.subject[i] = static_cast<std::int64_t>(i + 1);
        }

        BootstrapConfig boot;
        boot.replicates = 200;
        boot.seed = 8000 + static_cast<std::uint64_t>(rep);
        boot.level = 0.95;
        const std::vector<std::size_t> targets{0};
        const auto result =
            bootstrap_intervals(data, PenaltySpec::none(2), targets, boot, OptimizerConfig{});
        if (result.lower[0] <= true_effect && true_effect <= result.upper[0]) ++covered;
    }

    const double elapsed = timer.seconds();
    const double rate = static_cast<double>(covered) / repetitions;
    if (rate < 0.90) {
        pass = false;
        detail = "coverage " + fmt(rate) + " below 0.90";
    } else if (elapsed >= 3600.0) {
        pass = false;
        detail = "runtime " + fmt(elapsed) + " s exceeds 60 min";
    } else {
        detail = "coverage " + std::to_string(covered) + "/" + std::to_string(repetitions) +
                 ", B=200, " + fmt(elapsed) + " s";
    }
    report(8, "bootstrap interval coverage", pass, detail);
}

}  // namespace

int main() {
    criterion_segmented_scan_oracle();
    criterion_gradient_equivalence();
    criterion_finite_differences();
    criterion_transform_equivalence();
    criterion_optimizer_reference();
    criterion_scaling_shape();
    criterion_determinism();
    criterion_bootstrap_coverage();
    if (failures == 0)
        std::cout << "all acceptance criteria passed" << std::endl;
    else
        std::cout << failures << " acceptance criteria failed" << std::endl;
    return failures;
}
