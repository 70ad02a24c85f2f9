#pragma once

// Survival data containers and the sorted layout every evaluation runs over.
// Rows are sorted stratum-major with decreasing observed time, so the risk
// set of any row is a stratum-local prefix ending at its tie group.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stratcox/errors.hpp"

namespace stratcox {

// One covariate column in compressed sparse form: strictly increasing row
// indices, no stored zeros.
struct SparseColumn {
    std::vector<std::int64_t> rows;
    std::vector<double> values;

    std::size_t nnz() const { return rows.size(); }
    void push(std::int64_t row, double value) {
        rows.push_back(row);
        values.push_back(value);
    }
};

struct SurvivalDataset {
    std::vector<double> time;             // observed time per row, >= 0
    std::vector<std::uint8_t> event;      // 1 = event, 0 = censored
    std::vector<std::int32_t> stratum;    // dense labels 1..K
    std::vector<std::int64_t> subject;    // originating subject; augmentation rows share it
    std::vector<SparseColumn> columns;    // P covariate columns
    std::vector<std::string> covariate_names;  // optional; x1..xP assumed when empty
    std::vector<std::string> stratum_labels;   // optional original labels, index k-1

    std::size_t n_rows() const { return time.size(); }
    std::size_t n_covariates() const { return columns.size(); }
    std::int32_t n_strata() const;

    std::string covariate_name(std::size_t j) const;
    std::string stratum_label(std::int32_t k) const;
};

// Throws validation_error describing the first violated dataset invariant.
void validate_invariants(const SurvivalDataset& data);

struct SortedDesign {
    SurvivalDataset data;                     // rows permuted, columns re-indexed
    std::vector<std::int64_t> perm;           // sorted position -> input row
    std::vector<std::uint8_t> head_flags;     // 1 at the first row of each stratum
    std::vector<std::int64_t> tie_group_end;  // last sorted row sharing (stratum, time)
    std::vector<std::int64_t> stratum_offsets;  // K+1 prefix offsets into the layout

    std::size_t n_rows() const { return data.n_rows(); }
    std::size_t n_covariates() const { return data.n_covariates(); }
    std::int32_t n_strata() const {
        return static_cast<std::int32_t>(stratum_offsets.empty() ? 0 : stratum_offsets.size() - 1);
    }
};

// Sort key is (stratum asc, time desc, input order asc); the sort is stable so
// repeated fits of the same file are reproducible row for row.
SortedDesign build_sorted_design(const SurvivalDataset& data);

struct DatasetReport {
    std::size_t n_rows = 0;
    std::size_t n_covariates = 0;
    std::int32_t n_strata = 0;
    std::size_t total_events = 0;
    std::size_t nnz = 0;
    double sparsity = 1.0;  // fraction of zero entries in the dense view
    std::vector<std::size_t> stratum_rows;    // size K
    std::vector<std::size_t> stratum_events;  // size K
    std::vector<std::string> warnings;

    std::string to_text() const;
};

// Reporting only; never throws on content (structural problems still throw).
DatasetReport validate_dataset(const SurvivalDataset& data);

// Rows of `data` at `row_indices` (repeats allowed, order kept), with stratum
// labels re-densified over the surviving strata. Used by cross-validation
// folds and bootstrap resamples.
SurvivalDataset subset_rows(const SurvivalDataset& data, std::span<const std::int64_t> row_indices);

// Reorders columns into lexicographic name order, the canonical order of
// datasets on disk. Returns new_index[old_index] for remapping anything that
// referenced the previous column positions.
std::vector<std::size_t> sort_columns_by_name(SurvivalDataset& data);

}  // namespace stratcox
