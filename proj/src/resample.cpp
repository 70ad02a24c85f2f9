#include "stratcox/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

namespace stratcox {

namespace {

// Subject ids in order of first appearance, plus each subject's row list.
struct SubjectIndex {
    std::vector<std::int64_t> ids;
    std::vector<std::vector<std::int64_t>> rows;
};

SubjectIndex index_subjects(const SurvivalDataset& data) {
    SubjectIndex index;
    std::unordered_map<std::int64_t, std::size_t> position;
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
        const auto [it, inserted] = position.try_emplace(data.subject[r], index.ids.size());
        if (inserted) {
            index.ids.push_back(data.subject[r]);
            index.rows.emplace_back();
        }
        index.rows[it->second].push_back(static_cast<std::int64_t>(r));
    }
    return index;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

double gamma_max(const SortedDesign& design, const PenaltySpec& penalty_template,
                 const ExecutionConfig& exec) {
    penalty_template.validate(design.n_covariates());
    CoefficientState state = make_state(design, std::vector<double>(design.n_covariates(), 0.0));
    ScanWorkspace workspace;
    double best = 0.0;
    for (std::size_t j = 0; j < design.n_covariates(); ++j) {
        if (penalty_template.gamma[j] <= 0.0) continue;
        if (design.data.columns[j].nnz() == 0) continue;
        const GradHess gh = gradient_hessian(design, state, j, workspace, exec);
        best = std::max(best, std::abs(gh.gradient));
    }
    return best;
}

std::vector<double> default_gamma_grid(double gamma_max_value, std::size_t size) {
    if (size < 1) throw validation_error("gamma grid size must be >= 1");
    if (!(gamma_max_value > 0.0)) throw validation_error("gamma_max must be positive");
    std::vector<double> grid(size);
    const double hi = std::log(gamma_max_value);
    const double lo = hi - std::log(1e4);
    for (std::size_t i = 0; i < size; ++i) {
        const double t = size == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(size - 1);
        grid[i] = std::exp(lo + t * (hi - lo));
    }
    return grid;
}

std::vector<int> fold_assignment(const SurvivalDataset& data, int folds, std::uint64_t seed) {
    if (folds < 2) throw validation_error("folds must be >= 2");
    const SubjectIndex subjects = index_subjects(data);
    const std::size_t n_subjects = subjects.ids.size();
    if (static_cast<std::size_t>(folds) > n_subjects)
        throw validation_error("degenerate fold; reduce folds or reseed");

    // Shuffled subjects dealt round-robin into folds.
    std::vector<std::size_t> order(n_subjects);
    for (std::size_t i = 0; i < n_subjects; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold_of(n_subjects);
    for (std::size_t i = 0; i < n_subjects; ++i)
        fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));

    std::vector<int> by_row(data.n_rows());
    for (std::size_t s = 0; s < n_subjects; ++s) {
        for (const std::int64_t r : subjects.rows[s]) by_row[static_cast<std::size_t>(r)] = fold_of[s];
    }
    return by_row;
}

CvResult kfold_select_gamma(const SurvivalDataset& data, const PenaltySpec& penalty_template,
                            const CvConfig& cv, const OptimizerConfig& opt) {
    penalty_template.validate(data.n_covariates());
    if (cv.gamma_grid.empty()) throw validation_error("gamma grid is empty");
    for (std::size_t i = 0; i < cv.gamma_grid.size(); ++i) {
        if (!(cv.gamma_grid[i] > 0.0) || (i > 0 && cv.gamma_grid[i] <= cv.gamma_grid[i - 1]))
            throw validation_error("gamma grid must be positive and strictly increasing");
    }

    const std::vector<int> fold_of_row = fold_assignment(data, cv.folds, cv.seed);

    // Event tally per fold.
    std::vector<std::size_t> fold_events(static_cast<std::size_t>(cv.folds), 0);
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
        if (data.event[r]) ++fold_events[static_cast<std::size_t>(fold_of_row[r])];
    }
    for (int f = 0; f < cv.folds; ++f) {
        if (fold_events[static_cast<std::size_t>(f)] == 0)
            throw validation_error("degenerate fold; reduce folds or reseed");
    }

    const std::size_t n_gamma = cv.gamma_grid.size();
    CvResult result;
    result.grid = cv.gamma_grid;
    result.fold_scores.assign(n_gamma, std::vector<double>(static_cast<std::size_t>(cv.folds), 0.0));
    std::vector<std::vector<std::string>> fold_warnings(static_cast<std::size_t>(cv.folds));
    std::vector<std::string> fold_failures(static_cast<std::size_t>(cv.folds));

#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < cv.folds; ++f) {
        try {
            std::vector<std::int64_t> train_rows, test_rows;
            for (std::size_t r = 0; r < data.n_rows(); ++r) {
                auto& sink = fold_of_row[r] == f ? test_rows : train_rows;
                sink.push_back(static_cast<std::int64_t>(r));
            }
            const SortedDesign train = build_sorted_design(subset_rows(data, train_rows));
            const SortedDesign test = build_sorted_design(subset_rows(data, test_rows));

            // Walk the grid from its sparse end, warm-starting each fit.
            std::vector<double> warm(data.n_covariates(), 0.0);
            for (std::size_t g = n_gamma; g-- > 0;) {
                PenaltySpec penalty = penalty_template;
                for (double& w : penalty.gamma) w = w > 0.0 ? cv.gamma_grid[g] : 0.0;
                double score = -std::numeric_limits<double>::infinity();
                try {
                    const FitResult fit = ccd_fit(train, penalty, opt, warm);
                    warm = fit.beta;
                    const CoefficientState held = make_state(test, fit.beta);
                    score = log_partial_likelihood(test, held, opt.exec);
                } catch (const error& e) {
                    fold_warnings[static_cast<std::size_t>(f)].push_back(
                        "fold " + std::to_string(f) + ", gamma " +
                        std::to_string(cv.gamma_grid[g]) + ": " + e.what());
                }
                result.fold_scores[g][static_cast<std::size_t>(f)] = score;
            }
        } catch (const std::exception& e) {
            fold_failures[static_cast<std::size_t>(f)] = e.what();
        }
    }
    for (const auto& failure : fold_failures) {
        if (!failure.empty()) throw numeric_error("cross-validation fold failed: " + failure);
    }
    for (const auto& warnings : fold_warnings)
        result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());

    result.mean_scores.assign(n_gamma, 0.0);
    for (std::size_t g = 0; g < n_gamma; ++g) {
        double total = 0.0;
        for (int f = 0; f < cv.folds; ++f) total += result.fold_scores[g][static_cast<std::size_t>(f)];
        result.mean_scores[g] = total / static_cast<double>(cv.folds);
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < n_gamma; ++g) {
        if (result.mean_scores[g] >= result.mean_scores[best]) best = g;  // ties favor larger gamma
    }
    result.gamma_star = result.grid[best];
    return result;
}

double percentile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw validation_error("percentile of empty sample");
    const double n = static_cast<double>(sorted.size());
    double h = q * (n + 1.0) - 1.0;
    h = std::min(std::max(h, 0.0), n - 1.0);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapResult bootstrap_intervals(const SurvivalDataset& data, const PenaltySpec& penalty,
                                    std::span<const std::size_t> targets,
                                    const BootstrapConfig& boot, const OptimizerConfig& opt) {
    penalty.validate(data.n_covariates());
    if (boot.replicates < 2) throw validation_error("bootstrap needs at least 2 replicates");
    if (!(boot.level > 0.0 && boot.level < 1.0))
        throw validation_error("interval level must lie in (0, 1)");
    if (targets.empty()) throw validation_error("no bootstrap targets given");
    for (const std::size_t j : targets) {
        if (j >= data.n_covariates()) throw validation_error("bootstrap target out of range");
        if (penalty.gamma[j] != 0.0)
            throw validation_error("bootstrap targets must be unpenalized coefficients");
    }

    const SubjectIndex subjects = index_subjects(data);
    const std::size_t n_subjects = subjects.ids.size();
    const int b = boot.replicates;

    std::vector<std::vector<double>> estimates(static_cast<std::size_t>(b));
    std::vector<std::uint8_t> kept(static_cast<std::size_t>(b), 0);
    std::vector<std::string> messages(static_cast<std::size_t>(b));

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < b; ++r) {
        try {
            std::mt19937_64 rng(mix_seed(boot.seed, static_cast<std::uint64_t>(r)));
            std::uniform_int_distribution<std::size_t> pick(0, n_subjects - 1);
            std::vector<std::int64_t> rows;
            rows.reserve(data.n_rows());
            for (std::size_t s = 0; s < n_subjects; ++s) {
                const std::size_t chosen = pick(rng);
                rows.insert(rows.end(), subjects.rows[chosen].begin(), subjects.rows[chosen].end());
            }
            const SortedDesign design = build_sorted_design(subset_rows(data, rows));
            const FitResult fit = ccd_fit(design, penalty, opt);
            if (!fit.converged) {
                messages[static_cast<std::size_t>(r)] =
                    "replicate " + std::to_string(r) + " did not converge; dropped";
            } else {
                std::vector<double>& est = estimates[static_cast<std::size_t>(r)];
                est.reserve(targets.size());
                for (const std::size_t j : targets) est.push_back(fit.beta[j]);
                kept[static_cast<std::size_t>(r)] = 1;
            }
        } catch (const error& e) {
            messages[static_cast<std::size_t>(r)] =
                "replicate " + std::to_string(r) + " failed: " + e.what() + "; dropped";
        }
    }

    BootstrapResult result;
    result.targets.assign(targets.begin(), targets.end());
    for (int r = 0; r < b; ++r) {
        if (kept[static_cast<std::size_t>(r)])
            result.replicate_estimates.push_back(std::move(estimates[static_cast<std::size_t>(r)]));
        else {
            ++result.dropped;
            result.warnings.push_back(messages[static_cast<std::size_t>(r)]);
        }
    }
    if (result.dropped * 10 > b)
        throw numeric_error("bootstrap: " + std::to_string(result.dropped) + " of " +
                            std::to_string(b) + " replicates dropped (over 10%)");

    const double alpha = 1.0 - boot.level;
    std::vector<double> sample(result.replicate_estimates.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        for (std::size_t r = 0; r < result.replicate_estimates.size(); ++r)
            sample[r] = result.replicate_estimates[r][t];
        std::sort(sample.begin(), sample.end());
        result.lower.push_back(percentile(sample, alpha / 2.0));
        result.upper.push_back(percentile(sample, 1.0 - alpha / 2.0));
    }
    return result;
}

}  // namespace stratcox
