#include "stratcox/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace stratcox {

std::int32_t SurvivalDataset::n_strata() const {
    std::int32_t k = 0;
    for (auto s : stratum) k = std::max(k, s);
    return k;
}

std::string SurvivalDataset::covariate_name(std::size_t j) const {
    if (j < covariate_names.size() && !covariate_names[j].empty()) return covariate_names[j];
    return "x" + std::to_string(j + 1);
}

std::string SurvivalDataset::stratum_label(std::int32_t k) const {
    const std::size_t idx = static_cast<std::size_t>(k - 1);
    if (idx < stratum_labels.size() && !stratum_labels[idx].empty()) return stratum_labels[idx];
    return std::to_string(k);
}

void validate_invariants(const SurvivalDataset& data) {
    const std::size_t n = data.n_rows();
    if (data.event.size() != n || data.stratum.size() != n || data.subject.size() != n)
        throw validation_error("row vectors have inconsistent lengths");
    const std::int32_t k_count = data.n_strata();
    if (n > 0 && k_count < 1) throw validation_error("dataset has no strata");
    std::vector<std::size_t> per_stratum(static_cast<std::size_t>(k_count), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = data.time[i];
        if (!std::isfinite(t) || t < 0.0)
            throw validation_error("negative or non-finite time at row " + std::to_string(i));
        if (data.event[i] > 1)
            throw validation_error("event indicator must be 0 or 1 at row " + std::to_string(i));
        const std::int32_t s = data.stratum[i];
        if (s < 1 || s > k_count)
            throw validation_error("stratum label out of range at row " + std::to_string(i));
        ++per_stratum[static_cast<std::size_t>(s - 1)];
    }
    for (std::int32_t k = 1; k <= k_count; ++k) {
        if (per_stratum[static_cast<std::size_t>(k - 1)] == 0)
            throw validation_error("stratum " + std::to_string(k) + " has zero rows");
    }
    for (std::size_t j = 0; j < data.n_covariates(); ++j) {
        const SparseColumn& col = data.columns[j];
        if (col.rows.size() != col.values.size())
            throw validation_error("column " + data.covariate_name(j) + " index/value length mismatch");
        std::int64_t prev = -1;
        for (std::size_t t = 0; t < col.rows.size(); ++t) {
            const std::int64_t r = col.rows[t];
            if (r <= prev)
                throw validation_error("column " + data.covariate_name(j) +
                                       " row indices must be strictly increasing");
            if (r < 0 || r >= static_cast<std::int64_t>(n))
                throw validation_error("column " + data.covariate_name(j) + " row index out of range");
            if (!std::isfinite(col.values[t]))
                throw validation_error("column " + data.covariate_name(j) + " has a non-finite value");
            prev = r;
        }
    }
}

SortedDesign build_sorted_design(const SurvivalDataset& data) {
    validate_invariants(data);
    const std::size_t n = data.n_rows();
    if (n == 0) throw validation_error("dataset has no rows");

    SortedDesign design;
    design.perm.resize(n);
    std::iota(design.perm.begin(), design.perm.end(), std::int64_t{0});
    std::stable_sort(design.perm.begin(), design.perm.end(),
                     [&](std::int64_t a, std::int64_t b) {
                         if (data.stratum[a] != data.stratum[b])
                             return data.stratum[a] < data.stratum[b];
                         return data.time[a] > data.time[b];
                     });

    std::vector<std::int64_t> inverse(n);
    for (std::size_t s = 0; s < n; ++s) inverse[design.perm[s]] = static_cast<std::int64_t>(s);

    SurvivalDataset& sorted = design.data;
    sorted.time.resize(n);
    sorted.event.resize(n);
    sorted.stratum.resize(n);
    sorted.subject.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        const std::int64_t r = design.perm[s];
        sorted.time[s] = data.time[r];
        sorted.event[s] = data.event[r];
        sorted.stratum[s] = data.stratum[r];
        sorted.subject[s] = data.subject[r];
    }
    sorted.covariate_names = data.covariate_names;
    sorted.stratum_labels = data.stratum_labels;

    sorted.columns.resize(data.n_covariates());
    const std::int64_t p = static_cast<std::int64_t>(data.n_covariates());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (std::int64_t j = 0; j < p; ++j) {
        const SparseColumn& src = data.columns[static_cast<std::size_t>(j)];
        SparseColumn& dst = sorted.columns[static_cast<std::size_t>(j)];
        dst.rows.resize(src.nnz());
        dst.values.resize(src.nnz());
        std::vector<std::size_t> order(src.nnz());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return inverse[src.rows[a]] < inverse[src.rows[b]];
        });
        for (std::size_t t = 0; t < order.size(); ++t) {
            dst.rows[t] = inverse[src.rows[order[t]]];
            dst.values[t] = src.values[order[t]];
        }
    }

    design.head_flags.assign(n, 0);
    design.head_flags[0] = 1;
    design.stratum_offsets.push_back(0);
    for (std::size_t s = 1; s < n; ++s) {
        if (sorted.stratum[s] != sorted.stratum[s - 1]) {
            design.head_flags[s] = 1;
            design.stratum_offsets.push_back(static_cast<std::int64_t>(s));
        }
    }
    design.stratum_offsets.push_back(static_cast<std::int64_t>(n));

    // Rows tied on (stratum, time) all point at the last row of their group,
    // so a gather through tie_group_end reads the full tied risk-set sum.
    design.tie_group_end.resize(n);
    std::size_t s = 0;
    while (s < n) {
        std::size_t e = s;
        while (e + 1 < n && sorted.stratum[e + 1] == sorted.stratum[s] &&
               sorted.time[e + 1] == sorted.time[s])
            ++e;
        for (std::size_t i = s; i <= e; ++i)
            design.tie_group_end[i] = static_cast<std::int64_t>(e);
        s = e + 1;
    }
    return design;
}

DatasetReport validate_dataset(const SurvivalDataset& data) {
    validate_invariants(data);
    DatasetReport report;
    report.n_rows = data.n_rows();
    report.n_covariates = data.n_covariates();
    report.n_strata = data.n_strata();
    report.stratum_rows.assign(static_cast<std::size_t>(report.n_strata), 0);
    report.stratum_events.assign(static_cast<std::size_t>(report.n_strata), 0);
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        const std::size_t k = static_cast<std::size_t>(data.stratum[i] - 1);
        ++report.stratum_rows[k];
        if (data.event[i]) {
            ++report.stratum_events[k];
            ++report.total_events;
        }
    }
    for (const auto& col : data.columns) report.nnz += col.nnz();
    const double cells = static_cast<double>(report.n_rows) * static_cast<double>(report.n_covariates);
    report.sparsity = cells > 0 ? 1.0 - static_cast<double>(report.nnz) / cells : 1.0;

    if (report.total_events == 0)
        report.warnings.push_back("no events; likelihood constant");
    for (std::int32_t k = 1; k <= report.n_strata; ++k) {
        if (report.stratum_events[static_cast<std::size_t>(k - 1)] == 0 && report.total_events > 0)
            report.warnings.push_back("stratum " + data.stratum_label(k) +
                                      " has no events; its rows contribute no gradient terms");
    }
    for (std::size_t j = 0; j < data.n_covariates(); ++j) {
        if (data.columns[j].nnz() == 0)
            report.warnings.push_back("covariate " + data.covariate_name(j) + " never observed");
    }
    return report;
}

std::string DatasetReport::to_text() const {
    std::ostringstream out;
    out << "rows: " << n_rows << "\n";
    out << "covariates: " << n_covariates << "\n";
    out << "strata: " << n_strata << "\n";
    out << "events: " << total_events << "\n";
    out << "nonzeros: " << nnz << "\n";
    out << "sparsity: " << sparsity << "\n";
    for (std::int32_t k = 1; k <= n_strata; ++k) {
        out << "stratum " << k << ": rows=" << stratum_rows[static_cast<std::size_t>(k - 1)]
            << " events=" << stratum_events[static_cast<std::size_t>(k - 1)] << "\n";
    }
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    return out.str();
}

std::vector<std::size_t> sort_columns_by_name(SurvivalDataset& data) {
    const std::size_t p = data.n_covariates();
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.covariate_name(a) < data.covariate_name(b);
    });
    std::vector<SparseColumn> columns(p);
    std::vector<std::string> names(p);
    std::vector<std::size_t> new_of_old(p);
    for (std::size_t pos = 0; pos < p; ++pos) {
        columns[pos] = std::move(data.columns[order[pos]]);
        names[pos] = data.covariate_name(order[pos]);
        new_of_old[order[pos]] = pos;
    }
    data.columns = std::move(columns);
    data.covariate_names = std::move(names);
    return new_of_old;
}

SurvivalDataset subset_rows(const SurvivalDataset& data, std::span<const std::int64_t> row_indices) {
    SurvivalDataset out;
    const std::size_t n = row_indices.size();
    out.time.reserve(n);
    out.event.reserve(n);
    out.subject.reserve(n);
    out.stratum.reserve(n);
    out.covariate_names = data.covariate_names;

    // Dense relabeling of the strata that survive, in ascending label order.
    std::vector<std::int32_t> remap(static_cast<std::size_t>(data.n_strata()) + 1, 0);
    for (const std::int64_t r : row_indices) {
        if (r < 0 || r >= static_cast<std::int64_t>(data.n_rows()))
            throw validation_error("subset row index out of range");
        remap[static_cast<std::size_t>(data.stratum[r])] = 1;
    }
    std::int32_t next = 0;
    for (std::size_t k = 1; k < remap.size(); ++k) {
        if (remap[k]) {
            remap[k] = ++next;
            if (!data.stratum_labels.empty())
                out.stratum_labels.push_back(data.stratum_label(static_cast<std::int32_t>(k)));
        }
    }

    for (const std::int64_t r : row_indices) {
        out.time.push_back(data.time[r]);
        out.event.push_back(data.event[r]);
        out.subject.push_back(data.subject[r]);
        out.stratum.push_back(remap[static_cast<std::size_t>(data.stratum[r])]);
    }

    // Sparse gather per column. Repeated input rows are allowed (bootstrap),
    // so the selection is driven by the new row list, not the old indices.
    std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> hits;  // old row -> new rows
    hits.resize(data.n_rows());
    for (std::size_t s = 0; s < n; ++s)
        hits[static_cast<std::size_t>(row_indices[s])].emplace_back(static_cast<std::int64_t>(s), 0);

    out.columns.resize(data.n_covariates());
    std::vector<std::pair<std::int64_t, double>> scratch;
    for (std::size_t j = 0; j < data.n_covariates(); ++j) {
        const SparseColumn& src = data.columns[j];
        scratch.clear();
        for (std::size_t t = 0; t < src.nnz(); ++t) {
            for (const auto& [new_row, unused] : hits[static_cast<std::size_t>(src.rows[t])])
                scratch.emplace_back(new_row, src.values[t]);
        }
        std::sort(scratch.begin(), scratch.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        SparseColumn& dst = out.columns[j];
        dst.rows.reserve(scratch.size());
        dst.values.reserve(scratch.size());
        for (const auto& [row, value] : scratch) dst.push(row, value);
    }
    return out;
}

}  // namespace stratcox
