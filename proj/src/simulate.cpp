#include "stratcox/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace stratcox {

Simulated simulate(const SimulateConfig& config) {
    if (config.n < 1) throw validation_error("n must be >= 1");
    if (config.density < 0.0 || config.density >= 1.0)
        throw validation_error("density must lie in [0, 1)");
    if (config.beta_sparsity < 0.0 || config.beta_sparsity >= 1.0)
        throw validation_error("beta_sparsity must lie in [0, 1)");
    if (config.strata < 1 || static_cast<std::size_t>(config.strata) > config.n)
        throw validation_error("strata count must lie in [1, n]");
    if (config.censoring < 0.0 || config.censoring >= 1.0)
        throw validation_error("censoring must lie in [0, 1)");

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    Simulated out;
    SurvivalDataset& data = out.data;
    data.columns.resize(config.p);

    // Sparse binary design via geometric gaps between ones.
    if (config.density > 0.0) {
        const double log1m = std::log1p(-config.density);
        for (std::size_t j = 0; j < config.p; ++j) {
            std::int64_t i = -1;
            while (true) {
                const double u = std::max(uniform(rng), 1e-300);
                i += 1 + static_cast<std::int64_t>(std::floor(std::log(u) / log1m));
                if (i >= static_cast<std::int64_t>(config.n)) break;
                data.columns[j].push(i, 1.0);
            }
        }
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    out.true_beta.resize(config.p);
    for (std::size_t j = 0; j < config.p; ++j) {
        const double value = normal(rng);
        out.true_beta[j] = uniform(rng) < 1.0 - config.beta_sparsity ? value : 0.0;
    }

    std::vector<double> eta(config.n, 0.0);
    for (std::size_t j = 0; j < config.p; ++j) {
        if (out.true_beta[j] == 0.0) continue;
        const SparseColumn& col = data.columns[j];
        for (std::size_t t = 0; t < col.nnz(); ++t)
            eta[static_cast<std::size_t>(col.rows[t])] += col.values[t] * out.true_beta[j];
    }

    std::vector<double> event_time(config.n);
    for (std::size_t i = 0; i < config.n; ++i) {
        const double u = std::max(uniform(rng), 1e-300);
        event_time[i] = -std::log(u) / std::exp(eta[i]);
    }

    data.time.resize(config.n);
    data.event.assign(config.n, 1);
    data.subject.resize(config.n);
    data.stratum.resize(config.n);
    for (std::size_t i = 0; i < config.n; ++i) {
        data.subject[i] = static_cast<std::int64_t>(i + 1);
        data.stratum[i] = static_cast<std::int32_t>(i % static_cast<std::size_t>(config.strata)) + 1;
    }

    if (config.censoring > 0.0) {
        // With C ~ U(0, cmax), the expected censored fraction is
        // mean_i min(1, T_i / cmax); bisect cmax to hit the target.
        auto censored_fraction = [&](double cmax) {
            double total = 0.0;
            for (const double t : event_time) total += std::min(1.0, t / cmax);
            return total / static_cast<double>(config.n);
        };
        double lo = 1e-12, hi = 1.0;
        while (censored_fraction(hi) > config.censoring && hi < 1e300) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (censored_fraction(mid) > config.censoring)
                lo = mid;
            else
                hi = mid;
        }
        const double cmax = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < config.n; ++i) {
            const double c = uniform(rng) * cmax;
            if (event_time[i] <= c) {
                data.time[i] = event_time[i];
            } else {
                data.time[i] = c;
                data.event[i] = 0;
            }
        }
    } else {
        data.time = event_time;
    }
    return out;
}

}  // namespace stratcox
