#pragma once

// Penalty selection by k-fold cross-validation and uncertainty for
// unpenalized coefficients by bootstrap percentile intervals. Folds and
// resamples are drawn at subject level so augmentation rows never split.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stratcox/data.hpp"
#include "stratcox/optimizer.hpp"

namespace stratcox {

struct CvConfig {
    int folds = 10;
    std::vector<double> gamma_grid;  // strictly increasing, positive
    std::uint64_t seed = 1;
};

struct CvResult {
    double gamma_star = 0.0;
    std::vector<double> grid;
    std::vector<std::vector<double>> fold_scores;  // [grid index][fold]
    std::vector<double> mean_scores;               // [grid index]
    std::vector<std::string> warnings;
};

// Largest absolute penalized-coordinate gradient at beta = 0: the smallest
// shared weight that zeroes every penalized coefficient, and the anchor for
// the default grid.
double gamma_max(const SortedDesign& design, const PenaltySpec& penalty_template,
                 const ExecutionConfig& exec = {});

// 20 log-spaced values spanning [gamma_max / 1e4, gamma_max] by default.
std::vector<double> default_gamma_grid(double gamma_max_value, std::size_t size = 20);

// Per-row fold labels in [0, folds): subjects are shuffled by the seed and
// dealt round-robin, so all rows of a subject land in one fold.
std::vector<int> fold_assignment(const SurvivalDataset& data, int folds, std::uint64_t seed);

// For each grid value, fits on k-1 folds and scores the held-out fold by its
// own stratified partial log-likelihood (risk sets rebuilt among held-out
// subjects). Returns the grid value with the best mean score; ties break
// toward the larger (sparser) value. penalty_template marks which
// coefficients receive the shared weight (gamma > 0) and which stay
// unpenalized (gamma = 0).
CvResult kfold_select_gamma(const SurvivalDataset& data, const PenaltySpec& penalty_template,
                            const CvConfig& cv, const OptimizerConfig& opt);

struct BootstrapConfig {
    int replicates = 200;
    std::uint64_t seed = 1;
    double level = 0.95;
};

struct BootstrapResult {
    std::vector<std::size_t> targets;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::vector<double>> replicate_estimates;  // kept replicates, [replicate][target]
    int dropped = 0;
    std::vector<std::string> warnings;
};

// B subject-level resamples, each refit at the given penalty; interval bounds
// are empirical percentiles of the kept estimates with linear interpolation
// between order statistics. Replicates that fail to converge are dropped with
// a warning; more than 10% dropped is an error. Targets must be unpenalized.
BootstrapResult bootstrap_intervals(const SurvivalDataset& data, const PenaltySpec& penalty,
                                    std::span<const std::size_t> targets,
                                    const BootstrapConfig& boot, const OptimizerConfig& opt);

// Percentile with the (B+1)q order-statistic rule, clamped to the sample
// range; `sorted` must be ascending.
double percentile(std::span<const double> sorted, double q);

}  // namespace stratcox
