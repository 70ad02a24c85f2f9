#include "stratcox/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace stratcox {

PenaltySpec PenaltySpec::shared(std::size_t p, double gamma_value,
                                std::span<const std::size_t> unpenalized) {
    PenaltySpec spec{std::vector<double>(p, gamma_value)};
    for (const std::size_t j : unpenalized) {
        if (j >= p) throw validation_error("unpenalized index out of range");
        spec.gamma[j] = 0.0;
    }
    return spec;
}

double PenaltySpec::value(std::span<const double> beta) const {
    double total = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) total += gamma[j] * std::abs(beta[j]);
    return total;
}

void PenaltySpec::validate(std::size_t p) const {
    if (gamma.size() != p) throw validation_error("penalty length does not match covariate count");
    for (const double g : gamma) {
        if (!std::isfinite(g) || g < 0.0)
            throw validation_error("penalty weights must be finite and non-negative");
    }
}

double newton_step(double g1, double g2, bool* flat) {
    if (!std::isfinite(g1) || !std::isfinite(g2))
        throw numeric_error("non-finite gradient or Hessian in Newton step");
    if (flat) *flat = false;
    if (g2 < kFlatCurvature) {
        if (flat) *flat = true;
        return 0.0;
    }
    return -g1 / g2;
}

TrustOutcome apply_trust_region(double delta_proposed, double trust) {
    if (!std::isfinite(delta_proposed) || !std::isfinite(trust))
        throw numeric_error("non-finite trust-region inputs");
    const double magnitude = std::min(std::abs(delta_proposed), trust);
    const double applied = std::copysign(magnitude, delta_proposed);
    return {applied, std::max(2.0 * std::abs(applied), trust * 0.5)};
}

ProposedStep l1_coordinate_update(double g1, double g2, double beta_j, double gamma_j) {
    ProposedStep out;
    if (gamma_j == 0.0) {
        out.step = newton_step(g1, g2, &out.flat);
        return out;
    }
    if (beta_j != 0.0) {
        const double penalized = g1 + (beta_j > 0.0 ? gamma_j : -gamma_j);
        out.step = newton_step(penalized, g2, &out.flat);
        // A step across zero is truncated to land on it; the one-sided rule
        // below governs any further movement on later cycles.
        if ((beta_j > 0.0 && beta_j + out.step < 0.0) ||
            (beta_j < 0.0 && beta_j + out.step > 0.0))
            out.step = -beta_j;
        return out;
    }
    const double derivative_up = g1 + gamma_j;
    const double derivative_down = -g1 + gamma_j;
    if (derivative_up < 0.0 && derivative_down < 0.0)
        throw internal_error("both directional derivatives negative at the origin");
    if (derivative_up >= 0.0 && derivative_down >= 0.0) {
        out.skipped = true;
        return out;
    }
    const double penalized = derivative_up < 0.0 ? g1 + gamma_j : g1 - gamma_j;
    out.step = newton_step(penalized, g2, &out.flat);
    return out;
}

namespace {

FitResult run_ccd(const SortedDesign& design, const PenaltySpec& penalty,
                  const OptimizerConfig& config, std::span<const double> initial_beta) {
    const std::size_t p = design.n_covariates();
    penalty.validate(p);
    if (config.max_cycles < 1) throw validation_error("max_cycles must be >= 1");
    if (!(config.tolerance > 0.0)) throw validation_error("tolerance must be positive");
    if (!(config.initial_trust > 0.0)) throw validation_error("initial_trust must be positive");

    CoefficientState state = make_state(design, initial_beta);
    ScanWorkspace workspace;

    FitResult result;
    result.trust.assign(p, config.initial_trust);
    double objective =
        -log_partial_likelihood(design, state, config.exec, workspace) + penalty.value(state.beta);
    state.objective = objective;
    result.objective_trace.push_back(objective);

    for (int cycle = 1; cycle <= config.max_cycles; ++cycle) {
        double max_step = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            GradHess gh{0.0, 0.0};
            if (design.data.columns[j].nnz() > 0)
                gh = gradient_hessian(design, state, j, workspace, config.exec);
            const ProposedStep proposal =
                l1_coordinate_update(gh.gradient, gh.hessian, state.beta[j], penalty.gamma[j]);
            double applied = apply_trust_region(proposal.step, result.trust[j]).applied;
            int halvings = 0;
            while (applied != 0.0) {
                try {
                    update_xbeta(design, state, j, applied);
                    break;
                } catch (const numeric_error&) {
                    if (++halvings > 10) {
                        result.warnings.push_back("coordinate " + design.data.covariate_name(j) +
                                                  " skipped: step overflow persisted after 10 halvings");
                        applied = 0.0;
                        break;
                    }
                    applied *= 0.5;
                }
            }
            result.trust[j] = std::max(2.0 * std::abs(applied), result.trust[j] * 0.5);
            max_step = std::max(max_step, std::abs(applied));
        }

        const double next_objective =
            -log_partial_likelihood(design, state, config.exec, workspace) +
            penalty.value(state.beta);
        if (next_objective > objective + 1e-8)
            throw numeric_error("monotonicity violated: objective rose from " +
                                std::to_string(objective) + " to " + std::to_string(next_objective));
        objective = next_objective;
        state.objective = objective;
        result.objective_trace.push_back(objective);
        result.cycles_used = cycle;
        if (max_step < config.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.beta = state.beta;
    return result;
}

}  // namespace

FitResult ccd_fit(const SortedDesign& design, const PenaltySpec& penalty,
                  const OptimizerConfig& config) {
    const std::vector<double> zero(design.n_covariates(), 0.0);
    return run_ccd(design, penalty, config, zero);
}

FitResult ccd_fit(const SortedDesign& design, const PenaltySpec& penalty,
                  const OptimizerConfig& config, std::span<const double> initial_beta) {
    if (initial_beta.size() != design.n_covariates())
        throw validation_error("initial beta length does not match covariate count");
    return run_ccd(design, penalty, config, initial_beta);
}

}  // namespace stratcox
