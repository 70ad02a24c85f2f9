#pragma once

// Stratified partial log-likelihood, univariate gradient/Hessian, and the
// incrementally maintained X*beta cache. The scan-based evaluations cost O(N)
// per coordinate regardless of how the rows are stratified; the naive
// double-loop versions cost O(sum of squared stratum sizes) and are kept as
// the serial reference for tests and benchmarks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stratcox/data.hpp"
#include "stratcox/scan.hpp"

namespace stratcox {

// exp() argument beyond this is treated as an overflow of the linear
// predictor; callers shrink the offending step instead of clamping.
inline constexpr double kLinearPredictorBound = 700.0;

struct CoefficientState {
    std::vector<double> beta;        // P coefficients
    std::vector<double> xbeta;       // X*beta in sorted layout
    std::vector<double> exp_xbeta;   // exp(xbeta), kept in lockstep
    double objective = 0.0;          // penalized negative log partial likelihood
    std::uint32_t updates_since_refresh = 0;
};

// Builds the caches for a coefficient vector. Throws numeric_error when the
// linear predictor leaves [-700, 700].
CoefficientState make_state(const SortedDesign& design, std::span<const double> beta);

// Recomputes xbeta/exp_xbeta from scratch. In debug builds asserts that the
// incremental cache had drifted by at most 1e-9 relative.
void refresh_xbeta(const SortedDesign& design, CoefficientState& state);

// Applies beta[j] += delta and patches the caches along column j's support
// only; cost O(nnz(column j)). Throws numeric_error("step overflow") with the
// state unchanged when the step would overflow, so callers can halve and retry.
// Every 256 accepted nonzero updates the cache is rebuilt to cap drift.
void update_xbeta(const SortedDesign& design, CoefficientState& state, std::size_t j,
                  double delta);

// Scratch buffers for the three segmented scans of one gradient/Hessian
// evaluation; reusable across calls.
struct ScanWorkspace {
    std::vector<double> n1;          // X_j * exp(X beta)
    std::vector<double> n2;          // X_j^2 * exp(X beta)
    std::vector<double> scanned_d;   // segmented scan of exp(X beta)
    std::vector<double> scanned_n1;
    std::vector<double> scanned_n2;

    void resize(std::size_t n);
};

// log partial likelihood: one segmented scan of exp(xbeta) plus a gather
// through tie_group_end at event rows.
double log_partial_likelihood(const SortedDesign& design, const CoefficientState& state,
                              const ExecutionConfig& config, ScanWorkspace& workspace,
                              ScanCounters* counters = nullptr);
double log_partial_likelihood(const SortedDesign& design, const CoefficientState& state,
                              const ExecutionConfig& config = {},
                              ScanCounters* counters = nullptr);

struct GradHess {
    double gradient = 0.0;
    double hessian = 0.0;
};

// Derivatives of the negative log partial likelihood with respect to beta[j],
// from three segmented scans and one delta-weighted reduction. The Hessian is
// a sum of per-risk-set variances and is non-negative up to rounding.
GradHess gradient_hessian(const SortedDesign& design, const CoefficientState& state,
                          std::size_t j, ScanWorkspace& workspace,
                          const ExecutionConfig& config = {}, ScanCounters* counters = nullptr);

// Serial reference implementations: literal risk-set double loops.
GradHess naive_gradient_hessian(const SortedDesign& design, const CoefficientState& state,
                                std::size_t j);
double naive_log_partial_likelihood(const SortedDesign& design, const CoefficientState& state);

}  // namespace stratcox
