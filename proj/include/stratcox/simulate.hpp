#pragma once

// Synthetic stratified survival data: a sparse binary design, a sparse normal
// coefficient vector, exponential event times with rate exp(x'beta), and
// uniform censoring calibrated to a target censored fraction.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stratcox/data.hpp"

namespace stratcox {

struct SimulateConfig {
    std::size_t n = 1000;
    std::size_t p = 10;
    double density = 0.05;        // P(x_ij = 1)
    double beta_sparsity = 0.80;  // fraction of true coefficients forced to 0
    std::int32_t strata = 1;      // assigned round-robin, sizes differ by <= 1
    double censoring = 0.30;      // target censored fraction; 0 disables censoring
    std::uint64_t seed = 0;
};

struct Simulated {
    SurvivalDataset data;
    std::vector<double> true_beta;
};

Simulated simulate(const SimulateConfig& config);

}  // namespace stratcox
