#pragma once

// Cyclic coordinate descent over the penalized negative log partial
// likelihood: univariate Newton steps, per-coordinate trust-region clipping,
// and directional-derivative handling of the L1 penalty at the origin.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stratcox/data.hpp"
#include "stratcox/likelihood.hpp"
#include "stratcox/scan.hpp"

namespace stratcox {

struct PenaltySpec {
    std::vector<double> gamma;  // per-coefficient L1 weight, 0 = unpenalized

    static PenaltySpec none(std::size_t p) { return PenaltySpec{std::vector<double>(p, 0.0)}; }
    // Shared weight on every coefficient except the listed ones.
    static PenaltySpec shared(std::size_t p, double gamma_value,
                              std::span<const std::size_t> unpenalized = {});

    double value(std::span<const double> beta) const;
    void validate(std::size_t p) const;
};

struct OptimizerConfig {
    int max_cycles = 1000;
    double tolerance = 1e-6;     // sup-norm of applied steps over a full cycle
    double initial_trust = 1.0;  // per-coordinate trust-region half-width
    ExecutionConfig exec{};
};

struct FitResult {
    std::vector<double> beta;
    std::vector<double> objective_trace;  // initial objective, then one entry per cycle
    int cycles_used = 0;
    bool converged = false;
    std::vector<double> trust;  // final per-coordinate half-widths
    std::vector<std::string> warnings;
};

// Curvature below this counts as flat; the coordinate is skipped this cycle.
inline constexpr double kFlatCurvature = 1e-12;

// Newton step -g1/g2; returns 0 and sets *flat when the curvature is flat.
double newton_step(double g1, double g2, bool* flat = nullptr);

struct TrustOutcome {
    double applied;     // proposed step clipped to +/- trust
    double next_trust;  // max(2*|applied|, trust/2)
};
TrustOutcome apply_trust_region(double delta_proposed, double trust);

struct ProposedStep {
    double step = 0.0;
    bool skipped = false;  // subgradient optimality at beta_j = 0
    bool flat = false;
};

// Penalized Newton proposal for one coordinate. Away from zero the penalized
// gradient is g1 + sgn(beta_j)*gamma_j and a step crossing zero is truncated
// to land on it; at zero the one-sided derivatives decide between skipping
// and descending. gamma_j = 0 reduces to the plain Newton step.
ProposedStep l1_coordinate_update(double g1, double g2, double beta_j, double gamma_j);

FitResult ccd_fit(const SortedDesign& design, const PenaltySpec& penalty,
                  const OptimizerConfig& config);
FitResult ccd_fit(const SortedDesign& design, const PenaltySpec& penalty,
                  const OptimizerConfig& config, std::span<const double> initial_beta);

}  // namespace stratcox
