// stratcox command line: simulate / validate / transform / fit / benchmark.
// Exit codes: 0 success, 1 usage or parse error, 2 numerical failure,
// 3 non-convergence (partial results are still written).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stratcox/benchmark.hpp"
#include "stratcox/data.hpp"
#include "stratcox/io.hpp"
#include "stratcox/likelihood.hpp"
#include "stratcox/optimizer.hpp"
#include "stratcox/resample.hpp"
#include "stratcox/simulate.hpp"
#include "stratcox/transforms.hpp"

namespace {

using namespace stratcox;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitNotConverged = 3;

std::string derived_path(const std::string& out, const std::string& suffix) {
    const std::size_t dot = out.find_last_of('.');
    const std::size_t slash = out.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out + suffix;
    return out.substr(0, dot) + suffix;
}

std::vector<std::size_t> resolve_names(const std::vector<std::string>& names,
                                       const SurvivalDataset& data, const char* what) {
    std::vector<std::size_t> indices;
    for (const std::string& name : names) {
        bool found = false;
        for (std::size_t j = 0; j < data.n_covariates(); ++j) {
            if (data.covariate_name(j) == name) {
                indices.push_back(j);
                found = true;
                break;
            }
        }
        if (!found)
            throw validation_error(std::string(what) + " '" + name + "' is not a covariate");
    }
    return indices;
}

struct FitPaths {
    std::string data;
    std::string config;
    std::string out = "coefficients.csv";
    std::string meta_out;
    std::string cv_out;
    std::string trace_out;
};

int run_fit(const FitPaths& paths, int threads_flag, std::int64_t chunk_flag, double gamma_flag,
            bool gamma_flag_given) {
    const auto wall_start = std::chrono::steady_clock::now();
    const SurvivalDataset data = read_wide_csv(paths.data);

    ConfigMap config = paths.config.empty() ? ConfigMap::from_string("")
                                            : ConfigMap::from_file(paths.config);
    OptimizerConfig opt;
    opt.tolerance = config.get_double("tolerance", opt.tolerance);
    opt.max_cycles = static_cast<int>(config.get_int("max_cycles", opt.max_cycles));
    opt.initial_trust = config.get_double("initial_trust", opt.initial_trust);
    opt.exec.chunk_size =
        static_cast<std::size_t>(config.get_int("chunk_size", static_cast<std::int64_t>(opt.exec.chunk_size)));
    opt.exec.worker_count = static_cast<int>(config.get_int("threads", opt.exec.worker_count));
    if (threads_flag > 0) opt.exec.worker_count = threads_flag;
    if (chunk_flag > 0) opt.exec.chunk_size = static_cast<std::size_t>(chunk_flag);

    double gamma_value = config.get_double("gamma", 0.0);
    if (gamma_flag_given) gamma_value = gamma_flag;
    const std::vector<std::string> unpenalized_names = config.get_string_list("unpenalized");
    const bool cv_requested = config.has("folds") || config.has("gamma_grid") ||
                              config.has("gamma_grid_size");
    const int folds = static_cast<int>(config.get_int("folds", 10));
    std::vector<double> grid = config.get_double_list("gamma_grid");
    const std::size_t grid_size = static_cast<std::size_t>(config.get_int("gamma_grid_size", 20));
    const std::uint64_t cv_seed = static_cast<std::uint64_t>(config.get_int("cv_seed", 1));
    const int replicates = static_cast<int>(config.get_int("bootstrap_replicates", 0));
    const std::uint64_t boot_seed = static_cast<std::uint64_t>(config.get_int("bootstrap_seed", 1));
    const double level = config.get_double("interval_level", 0.95);
    const std::vector<std::string> target_names = config.get_string_list("bootstrap_targets");
    config.finish();

    const std::vector<std::size_t> unpenalized = resolve_names(unpenalized_names, data, "unpenalized");
    const std::vector<std::size_t> targets = resolve_names(target_names, data, "bootstrap target");

    const SortedDesign design = build_sorted_design(data);
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("rows", std::to_string(data.n_rows()));
    meta.emplace_back("covariates", std::to_string(data.n_covariates()));
    meta.emplace_back("strata", std::to_string(data.n_strata()));

    if (cv_requested) {
        const PenaltySpec penalty_template =
            PenaltySpec::shared(data.n_covariates(), 1.0, unpenalized);
        if (grid.empty()) {
            const double anchor = gamma_max(design, penalty_template, opt.exec);
            if (!(anchor > 0.0))
                throw validation_error("cannot build a gamma grid: gradient at zero vanishes");
            grid = default_gamma_grid(anchor, grid_size);
        }
        CvConfig cv;
        cv.folds = folds;
        cv.gamma_grid = grid;
        cv.seed = cv_seed;
        const CvResult result = kfold_select_gamma(data, penalty_template, cv, opt);
        gamma_value = result.gamma_star;
        const std::string cv_path =
            paths.cv_out.empty() ? derived_path(paths.out, "_cv.csv") : paths.cv_out;
        write_cv_csv(cv_path, result.grid, result.fold_scores);
        meta.emplace_back("gamma_star", format_double(result.gamma_star));
        for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
    }

    const PenaltySpec penalty = PenaltySpec::shared(data.n_covariates(), gamma_value, unpenalized);
    const FitResult fit = ccd_fit(design, penalty, opt);

    std::vector<CoefficientRow> rows(data.n_covariates());
    for (std::size_t j = 0; j < data.n_covariates(); ++j) {
        rows[j].name = data.covariate_name(j);
        rows[j].beta = fit.beta[j];
    }

    if (replicates > 0 && !targets.empty()) {
        BootstrapConfig boot;
        boot.replicates = replicates;
        boot.seed = boot_seed;
        boot.level = level;
        const BootstrapResult result = bootstrap_intervals(data, penalty, targets, boot, opt);
        for (std::size_t t = 0; t < targets.size(); ++t) {
            rows[targets[t]].has_interval = true;
            rows[targets[t]].lower = result.lower[t];
            rows[targets[t]].upper = result.upper[t];
        }
        meta.emplace_back("bootstrap_replicates", std::to_string(replicates));
        meta.emplace_back("bootstrap_dropped", std::to_string(result.dropped));
        for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
    }

    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - wall_start;
    meta.emplace_back("gamma", format_double(gamma_value));
    meta.emplace_back("cycles", std::to_string(fit.cycles_used));
    meta.emplace_back("converged", fit.converged ? "true" : "false");
    meta.emplace_back("objective_initial", format_double(fit.objective_trace.front()));
    meta.emplace_back("objective_final", format_double(fit.objective_trace.back()));
    meta.emplace_back("wall_seconds", format_double(wall.count()));

    write_coefficients_csv(paths.out, rows);
    const std::string meta_path =
        paths.meta_out.empty() ? derived_path(paths.out, "_meta.csv") : paths.meta_out;
    write_key_value_csv(meta_path, meta);
    if (!paths.trace_out.empty()) write_trace_csv(paths.trace_out, fit.objective_trace);
    for (const auto& warning : fit.warnings) std::cerr << "warning: " << warning << "\n";

    if (!fit.converged) {
        std::cerr << "fit did not converge within " << fit.cycles_used
                  << " cycles; partial result saved to " << paths.out << "\n";
        return kExitNotConverged;
    }
    std::cout << "fit converged in " << fit.cycles_used << " cycles; wrote " << paths.out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stratified Cox model fitting with L1 regularization and\n"
                 "time-varying lowering, built on parallel segmented scans."};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic stratified dataset");
    SimulateConfig sim;
    std::string sim_out = "simulated.csv";
    std::string sim_beta_out;
    sim_cmd->add_option("--n", sim.n, "Rows to generate")->capture_default_str();
    sim_cmd->add_option("--p", sim.p, "Covariate count")->capture_default_str();
    sim_cmd->add_option("--density", sim.density, "P(x_ij = 1)")->capture_default_str();
    sim_cmd->add_option("--beta-sparsity", sim.beta_sparsity, "Fraction of zero true coefficients")
        ->capture_default_str();
    sim_cmd->add_option("--strata", sim.strata, "Strata count (round-robin)")->capture_default_str();
    sim_cmd->add_option("--censoring", sim.censoring, "Target censored fraction")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
    sim_cmd->add_option("--out", sim_out, "Output dataset path")->capture_default_str();
    sim_cmd->add_option("--beta-out", sim_beta_out, "True-coefficient CSV path");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "Print dataset diagnostics");
    std::string val_data;
    val_cmd->add_option("--data", val_data, "Wide-format dataset")->required();

    // transform
    auto* tr_cmd = app.add_subcommand(
        "transform", "Lower a long-format time-varying dataset to stratified wide format");
    std::string tr_data, tr_out = "augmented.csv", tr_map_out;
    std::vector<double> tr_cuts;
    std::vector<std::string> tr_splits;
    tr_cmd->add_option("--data", tr_data, "Long-format dataset")->required();
    tr_cmd->add_option("--cuts", tr_cuts, "Interval cut points (comma separated)")
        ->delimiter(',');
    tr_cmd->add_option("--split", tr_splits,
                       "Coefficient split, name:t1[:t2...]; repeatable");
    tr_cmd->add_option("--out", tr_out, "Output wide dataset path")->capture_default_str();
    tr_cmd->add_option("--map-out", tr_map_out, "Column map sidecar path");

    // fit
    auto* fit_cmd = app.add_subcommand(
        "fit",
        "Fit a stratified Cox model.\n"
        "Config file keys (key = value, one per line, # comments):\n"
        "  tolerance             convergence threshold on applied steps (1e-6)\n"
        "  max_cycles            cycle budget (1000)\n"
        "  initial_trust         trust-region half-width (1)\n"
        "  gamma                 shared L1 weight (0)\n"
        "  unpenalized           covariate names exempt from the penalty (none)\n"
        "  folds                 cross-validation folds; presence enables CV (10)\n"
        "  gamma_grid            explicit comma-separated grid (derived when absent)\n"
        "  gamma_grid_size       log-spaced grid size when derived (20)\n"
        "  cv_seed               fold-assignment seed (1)\n"
        "  bootstrap_replicates  resample refits; 0 disables (0)\n"
        "  bootstrap_targets     unpenalized covariates to interval (none)\n"
        "  bootstrap_seed        resampling seed (1)\n"
        "  interval_level        percentile interval level (0.95)\n"
        "  threads               scan worker count (hardware)\n"
        "  chunk_size            scan chunk size (4096)");
    FitPaths fit_paths;
    int fit_threads = 0;
    std::int64_t fit_chunk = 0;
    double fit_gamma = 0.0;
    fit_cmd->add_option("--data", fit_paths.data, "Wide-format dataset")->required();
    fit_cmd->add_option("--config", fit_paths.config, "key = value configuration file");
    fit_cmd->add_option("--out", fit_paths.out, "Coefficient CSV path")->capture_default_str();
    fit_cmd->add_option("--meta-out", fit_paths.meta_out, "Run metadata CSV path");
    fit_cmd->add_option("--cv-out", fit_paths.cv_out, "Cross-validation report path");
    fit_cmd->add_option("--trace-out", fit_paths.trace_out, "Objective trace CSV path");
    fit_cmd->add_option("--threads", fit_threads, "Worker count (overrides config)");
    fit_cmd->add_option("--chunk-size", fit_chunk, "Scan chunk size (overrides config)");
    auto* gamma_opt = fit_cmd->add_option("--gamma", fit_gamma, "Shared L1 weight (overrides config)");

    // benchmark
    auto* bench_cmd = app.add_subcommand("benchmark", "Measure runtime per CCD iteration");
    BenchmarkConfig bench;
    std::string bench_out = "benchmark.csv";
    int bench_threads = 0;
    std::int64_t bench_chunk = 0;
    bench_cmd->add_option("--n", bench.sizes, "Sample sizes (comma separated)")->delimiter(',');
    bench_cmd->add_option("--p", bench.p, "Covariate count")->capture_default_str();
    bench_cmd->add_option("--strata", bench.strata, "Strata counts (comma separated)")
        ->delimiter(',');
    bench_cmd->add_option("--evaluators", bench.evaluators, "scan and/or naive")->delimiter(',');
    bench_cmd->add_option("--reps", bench.repetitions, "Repetitions per configuration")
        ->capture_default_str();
    bench_cmd->add_option("--density", bench.density, "Design density")->capture_default_str();
    bench_cmd->add_option("--sweep", bench.sweep, "Coordinate updates per repetition");
    bench_cmd->add_option("--seed", bench.seed, "RNG seed")->capture_default_str();
    bench_cmd->add_option("--threads", bench_threads, "Worker count");
    bench_cmd->add_option("--chunk-size", bench_chunk, "Scan chunk size");
    bench_cmd->add_option("--out", bench_out, "Report CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim_cmd->parsed()) {
            const Simulated result = simulate(sim);
            write_wide_csv(sim_out, result.data);
            if (!sim_beta_out.empty()) {
                std::vector<std::pair<std::string, std::string>> rows;
                for (std::size_t j = 0; j < result.true_beta.size(); ++j)
                    rows.emplace_back(result.data.covariate_name(j),
                                      format_double(result.true_beta[j]));
                write_key_value_csv(sim_beta_out, rows);
            }
            std::cout << "wrote " << sim_out << " (" << result.data.n_rows() << " rows, "
                      << result.data.n_covariates() << " covariates)\n";
            return kExitOk;
        }
        if (val_cmd->parsed()) {
            const SurvivalDataset data = read_wide_csv(val_data);
            std::cout << validate_dataset(data).to_text();
            return kExitOk;
        }
        if (tr_cmd->parsed()) {
            const LongData long_data = read_long_csv(tr_data);

            TimeVaryingSpec spec;
            std::set<double> cuts{0.0};
            for (const double c : tr_cuts) cuts.insert(c);
            for (const std::string& text : tr_splits) {
                const std::size_t colon = text.find(':');
                if (colon == std::string::npos || colon == 0)
                    throw validation_error("--split expects name:t1[:t2...], got '" + text + "'");
                TimeVaryingSpec::Split split;
                const std::string name = text.substr(0, colon);
                bool found = false;
                for (std::size_t j = 0; j < long_data.covariate_names.size(); ++j) {
                    if (long_data.covariate_names[j] == name) {
                        split.covariate = j;
                        found = true;
                        break;
                    }
                }
                if (!found) throw validation_error("split covariate '" + name + "' not in data");
                std::string rest = text.substr(colon + 1);
                std::size_t pos = 0;
                while (pos < rest.size()) {
                    const std::size_t next = rest.find(':', pos);
                    const std::string piece =
                        rest.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
                    split.times.push_back(std::stod(piece));
                    if (next == std::string::npos) break;
                    pos = next + 1;
                }
                for (const double t : split.times) cuts.insert(t);
                spec.splits.push_back(std::move(split));
            }
            if (*cuts.rbegin() < long_data.max_stop) cuts.insert(long_data.max_stop);
            spec.cut_points.assign(cuts.begin(), cuts.end());

            const TimeVaryingDataset tvd = to_time_varying(long_data, spec.cut_points);
            LoweredDataset lowered = lower_pipeline(tvd, spec);
            // The written file carries columns in canonical name order; keep
            // the sidecar's indices in step with it.
            const auto new_of_old = sort_columns_by_name(lowered.data);
            for (auto& entry : lowered.column_map) entry.column = new_of_old[entry.column];
            std::sort(lowered.column_map.begin(), lowered.column_map.end(),
                      [](const ColumnMapEntry& a, const ColumnMapEntry& b) {
                          return a.column < b.column;
                      });
            write_wide_csv(tr_out, lowered.data);
            const std::string map_path =
                tr_map_out.empty() ? derived_path(tr_out, "_map.csv") : tr_map_out;
            write_column_map_csv(map_path, lowered.column_map);
            std::cout << "wrote " << tr_out << " (" << lowered.data.n_rows() << " rows, "
                      << lowered.data.n_strata() << " strata)\n";
            return kExitOk;
        }
        if (fit_cmd->parsed()) {
            return run_fit(fit_paths, fit_threads, fit_chunk, fit_gamma, gamma_opt->count() > 0);
        }
        if (bench_cmd->parsed()) {
            if (bench_threads > 0) bench.exec.worker_count = bench_threads;
            if (bench_chunk > 0) bench.exec.chunk_size = static_cast<std::size_t>(bench_chunk);
            const std::vector<BenchmarkRow> rows = run_benchmark(bench, &std::cerr);
            write_benchmark_csv(bench_out, rows);
            std::cout << "wrote " << bench_out << " (" << rows.size() << " configurations)\n";
            return kExitOk;
        }
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
