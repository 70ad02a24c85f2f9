#include "stratcox/likelihood.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace stratcox {

namespace {

void check_linear_predictor(double v, std::int64_t row) {
    if (!std::isfinite(v) || std::abs(v) > kLinearPredictorBound)
        throw numeric_error("linear predictor overflow at row " + std::to_string(row));
}

}  // namespace

CoefficientState make_state(const SortedDesign& design, std::span<const double> beta) {
    if (beta.size() != design.n_covariates())
        throw validation_error("beta length does not match covariate count");
    CoefficientState state;
    state.beta.assign(beta.begin(), beta.end());
    state.xbeta.assign(design.n_rows(), 0.0);
    state.exp_xbeta.assign(design.n_rows(), 0.0);
    refresh_xbeta(design, state);
    state.updates_since_refresh = 0;
    return state;
}

void refresh_xbeta(const SortedDesign& design, CoefficientState& state) {
#ifndef NDEBUG
    const std::vector<double> before = state.xbeta;
    const bool had_cache = state.updates_since_refresh > 0;
#endif
    std::fill(state.xbeta.begin(), state.xbeta.end(), 0.0);
    for (std::size_t j = 0; j < design.n_covariates(); ++j) {
        const double b = state.beta[j];
        if (b == 0.0) continue;
        const SparseColumn& col = design.data.columns[j];
        for (std::size_t t = 0; t < col.nnz(); ++t)
            state.xbeta[static_cast<std::size_t>(col.rows[t])] += col.values[t] * b;
    }
    for (std::size_t s = 0; s < state.xbeta.size(); ++s) {
        check_linear_predictor(state.xbeta[s], static_cast<std::int64_t>(s));
        state.exp_xbeta[s] = std::exp(state.xbeta[s]);
    }
#ifndef NDEBUG
    if (had_cache) {
        for (std::size_t s = 0; s < state.xbeta.size(); ++s) {
            const double scale = std::max(1.0, std::abs(state.xbeta[s]));
            assert(std::abs(before[s] - state.xbeta[s]) <= 1e-9 * scale &&
                   "incremental xbeta cache drifted past 1e-9");
        }
    }
#endif
    state.updates_since_refresh = 0;
}

void update_xbeta(const SortedDesign& design, CoefficientState& state, std::size_t j,
                  double delta) {
    if (j >= design.n_covariates()) throw validation_error("covariate index out of range");
    if (!std::isfinite(delta)) throw numeric_error("non-finite coordinate step");
    const SparseColumn& col = design.data.columns[j];
    if (delta == 0.0 || col.nnz() == 0) {
        state.beta[j] += delta;
        return;
    }
    // Validate the whole column before touching the cache so a throw leaves
    // the state unmodified and the caller can retry with a smaller step.
    for (std::size_t t = 0; t < col.nnz(); ++t) {
        const double next = state.xbeta[static_cast<std::size_t>(col.rows[t])] + col.values[t] * delta;
        if (!std::isfinite(next) || std::abs(next) > kLinearPredictorBound)
            throw numeric_error("step overflow");
    }
    for (std::size_t t = 0; t < col.nnz(); ++t) {
        const std::size_t s = static_cast<std::size_t>(col.rows[t]);
        state.xbeta[s] += col.values[t] * delta;
        state.exp_xbeta[s] = std::exp(state.xbeta[s]);
    }
    state.beta[j] += delta;
    if (++state.updates_since_refresh >= 256) refresh_xbeta(design, state);
}

void ScanWorkspace::resize(std::size_t n) {
    n1.resize(n);
    n2.resize(n);
    scanned_d.resize(n);
    scanned_n1.resize(n);
    scanned_n2.resize(n);
}

double log_partial_likelihood(const SortedDesign& design, const CoefficientState& state,
                              const ExecutionConfig& config, ScanWorkspace& workspace,
                              ScanCounters* counters) {
    const std::size_t n = design.n_rows();
    if (state.xbeta.size() != n) throw validation_error("state does not match design");
    workspace.scanned_d.resize(n);
    segmented_inclusive_scan(state.exp_xbeta, design.head_flags, workspace.scanned_d, config,
                             counters);
    const auto& scanned_d = workspace.scanned_d;
    const auto& tie_end = design.tie_group_end;
    const double ll = chunked_transform_sum(
        n,
        [&](std::size_t i) {
            if (!design.data.event[i]) return 0.0;
            const double denom = scanned_d[static_cast<std::size_t>(tie_end[i])];
            return state.xbeta[i] - std::log(denom);
        },
        config, counters);
    if (!std::isfinite(ll)) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!design.data.event[i]) continue;
            const double denom = scanned_d[static_cast<std::size_t>(tie_end[i])];
            if (!(denom > 0.0) || !std::isfinite(denom))
                throw internal_error("risk-set sum not positive at sorted row " + std::to_string(i));
        }
        throw numeric_error("non-finite log partial likelihood");
    }
    return ll;
}

double log_partial_likelihood(const SortedDesign& design, const CoefficientState& state,
                              const ExecutionConfig& config, ScanCounters* counters) {
    ScanWorkspace workspace;
    return log_partial_likelihood(design, state, config, workspace, counters);
}

GradHess gradient_hessian(const SortedDesign& design, const CoefficientState& state,
                          std::size_t j, ScanWorkspace& workspace, const ExecutionConfig& config,
                          ScanCounters* counters) {
    const std::size_t n = design.n_rows();
    if (j >= design.n_covariates()) throw validation_error("covariate index out of range");
    if (state.xbeta.size() != n) throw validation_error("state does not match design");
    workspace.resize(n);

    const SparseColumn& col = design.data.columns[j];
    std::fill(workspace.n1.begin(), workspace.n1.end(), 0.0);
    std::fill(workspace.n2.begin(), workspace.n2.end(), 0.0);
    double linear_term = 0.0;  // sum of x_ij over event rows
    for (std::size_t t = 0; t < col.nnz(); ++t) {
        const std::size_t s = static_cast<std::size_t>(col.rows[t]);
        const double x = col.values[t];
        const double e = state.exp_xbeta[s];
        workspace.n1[s] = x * e;
        workspace.n2[s] = x * x * e;
        linear_term += x * static_cast<double>(design.data.event[s]);
    }

    segmented_inclusive_scan(state.exp_xbeta, design.head_flags, workspace.scanned_d, config,
                             counters);
    segmented_inclusive_scan(workspace.n1, design.head_flags, workspace.scanned_n1, config,
                             counters);
    segmented_inclusive_scan(workspace.n2, design.head_flags, workspace.scanned_n2, config,
                             counters);

    const auto& scanned_d = workspace.scanned_d;
    const auto& scanned_n1 = workspace.scanned_n1;
    const auto& scanned_n2 = workspace.scanned_n2;
    const auto& tie_end = design.tie_group_end;
    // Event rows read their tie group's closing scan value: the full tied
    // risk-set sums. Each Hessian term is the risk-set variance of x. The
    // event indicator enters as a weight; scanned_d is a prefix sum of
    // positive terms, so the ratios exist at every row.
    const auto [ratio_sum, variance_sum] = chunked_transform_sum2(
        n,
        [&](std::size_t i) -> std::pair<double, double> {
            const double weight = static_cast<double>(design.data.event[i]);
            const std::size_t g = static_cast<std::size_t>(tie_end[i]);
            const double d = scanned_d[g];
            const double r1 = scanned_n1[g] / d;
            const double r2 = scanned_n2[g] / d;
            return {weight * r1, weight * (r2 - r1 * r1)};
        },
        config, counters);

    GradHess out{-linear_term + ratio_sum, variance_sum};
    if (!std::isfinite(out.gradient) || !std::isfinite(out.hessian)) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!design.data.event[i]) continue;
            const double d = scanned_d[static_cast<std::size_t>(tie_end[i])];
            if (!(d > 0.0) || !std::isfinite(d))
                throw internal_error("risk-set sum not positive at sorted row " + std::to_string(i));
        }
        throw numeric_error("non-finite gradient/Hessian for covariate " +
                            design.data.covariate_name(j));
    }
    return out;
}

GradHess naive_gradient_hessian(const SortedDesign& design, const CoefficientState& state,
                                std::size_t j) {
    const std::size_t n = design.n_rows();
    if (j >= design.n_covariates()) throw validation_error("covariate index out of range");

    std::vector<double> xj(n, 0.0);
    const SparseColumn& col = design.data.columns[j];
    for (std::size_t t = 0; t < col.nnz(); ++t)
        xj[static_cast<std::size_t>(col.rows[t])] = col.values[t];

    GradHess out;
    const std::int32_t k_count = design.n_strata();
    for (std::int32_t k = 0; k < k_count; ++k) {
        const std::int64_t begin = design.stratum_offsets[static_cast<std::size_t>(k)];
        const std::int64_t end = design.stratum_offsets[static_cast<std::size_t>(k) + 1];
        for (std::int64_t i = begin; i < end; ++i) {
            if (!design.data.event[static_cast<std::size_t>(i)]) continue;
            double den = 0.0, num1 = 0.0, num2 = 0.0;
            for (std::int64_t r = begin; r < end; ++r) {
                if (design.data.time[static_cast<std::size_t>(r)] <
                    design.data.time[static_cast<std::size_t>(i)])
                    continue;
                const double e = state.exp_xbeta[static_cast<std::size_t>(r)];
                const double x = xj[static_cast<std::size_t>(r)];
                den += e;
                num1 += x * e;
                num2 += x * x * e;
            }
            out.gradient += num1 / den - xj[static_cast<std::size_t>(i)];
            out.hessian += num2 / den - (num1 / den) * (num1 / den);
        }
    }
    return out;
}

double naive_log_partial_likelihood(const SortedDesign& design, const CoefficientState& state) {
    double ll = 0.0;
    const std::int32_t k_count = design.n_strata();
    for (std::int32_t k = 0; k < k_count; ++k) {
        const std::int64_t begin = design.stratum_offsets[static_cast<std::size_t>(k)];
        const std::int64_t end = design.stratum_offsets[static_cast<std::size_t>(k) + 1];
        for (std::int64_t i = begin; i < end; ++i) {
            if (!design.data.event[static_cast<std::size_t>(i)]) continue;
            double den = 0.0;
            for (std::int64_t r = begin; r < end; ++r) {
                if (design.data.time[static_cast<std::size_t>(r)] >=
                    design.data.time[static_cast<std::size_t>(i)])
                    den += state.exp_xbeta[static_cast<std::size_t>(r)];
            }
            ll += state.xbeta[static_cast<std::size_t>(i)] - std::log(den);
        }
    }
    return ll;
}

}  // namespace stratcox
