#include "stratcox/transforms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace stratcox {

namespace {

std::string short_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Names stay comma- and space-free so they survive as CSV covariate tokens.
std::string window_name(const std::string& base, double start, double end, bool last) {
    return base + "[" + short_number(start) + "-" + short_number(end) + (last ? "]" : ")");
}

}  // namespace

int event_interval(double y, std::span<const double> cut_points) {
    const std::size_t k_count = cut_points.size() - 1;
    if (y == cut_points.back()) return static_cast<int>(k_count);
    const auto it = std::upper_bound(cut_points.begin(), cut_points.end(), y);
    return static_cast<int>(it - cut_points.begin());
}

bool at_risk_in_interval(double y, std::uint8_t event, int k, std::span<const double> cut_points) {
    if (y > cut_points[static_cast<std::size_t>(k - 1)]) return true;
    return event != 0 && y == cut_points[static_cast<std::size_t>(k - 1)] &&
           event_interval(y, cut_points) == k;
}

void validate_cut_points(std::span<const double> cut_points) {
    if (cut_points.size() < 2) throw validation_error("need at least two cut points");
    if (cut_points.front() != 0.0) throw validation_error("first cut point must be 0");
    for (std::size_t i = 1; i < cut_points.size(); ++i) {
        if (!std::isfinite(cut_points[i]) || cut_points[i] <= cut_points[i - 1])
            throw validation_error("cut points must be finite and strictly increasing");
    }
}

void validate(const TimeVaryingDataset& data) {
    validate_cut_points(data.cut_points);
    const std::size_t n = data.n_subjects();
    if (data.event.size() != n || data.subject.size() != n)
        throw validation_error("subject vectors have inconsistent lengths");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(data.time[i]) || data.time[i] < 0.0)
            throw validation_error("negative or non-finite time for subject index " +
                                   std::to_string(i));
    }
    for (const auto& cov : data.covariates) {
        if (cov.by_interval.size() != data.n_intervals())
            throw validation_error("covariate " + cov.name +
                                   " schedule does not cover every interval");
    }
}

TimeVaryingDataset make_time_varying(std::vector<double> time, std::vector<std::uint8_t> event,
                                     std::vector<std::int64_t> subject,
                                     std::vector<SparseColumn> columns,
                                     std::vector<std::string> names,
                                     std::vector<double> cut_points) {
    validate_cut_points(cut_points);
    TimeVaryingDataset out;
    out.time = std::move(time);
    out.event = std::move(event);
    out.subject = std::move(subject);
    out.cut_points = std::move(cut_points);
    const std::size_t k_count = out.n_intervals();
    for (std::size_t i = 0; i < out.time.size(); ++i) {
        if (out.time[i] > out.cut_points.back())
            throw validation_error("cut points do not cover follow-up of subject " +
                                   std::to_string(out.subject[i]));
    }
    out.covariates.resize(columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        ScheduledCovariate& cov = out.covariates[j];
        cov.name = j < names.size() ? names[j] : "x" + std::to_string(j + 1);
        cov.by_interval.resize(k_count);
        for (std::size_t k = 1; k <= k_count; ++k) {
            SparseColumn& col = cov.by_interval[k - 1];
            for (std::size_t t = 0; t < columns[j].nnz(); ++t) {
                const std::int64_t i = columns[j].rows[t];
                if (at_risk_in_interval(out.time[static_cast<std::size_t>(i)],
                                        out.event[static_cast<std::size_t>(i)],
                                        static_cast<int>(k), out.cut_points))
                    col.push(i, columns[j].values[t]);
            }
        }
    }
    return out;
}

std::pair<TimeVaryingDataset, std::vector<ColumnMapEntry>> split_time_varying_coefficient(
    const TimeVaryingDataset& data, const TimeVaryingSpec& spec) {
    validate(data);
    const auto& cuts = data.cut_points;
    const std::size_t k_count = data.n_intervals();

    std::vector<std::vector<double>> boundaries(data.n_covariates());
    for (const auto& split : spec.splits) {
        if (split.covariate >= data.n_covariates())
            throw validation_error("split covariate index out of range");
        if (split.times.empty())
            throw validation_error("split for covariate " + data.covariates[split.covariate].name +
                                   " declares no times");
        auto& b = boundaries[split.covariate];
        if (!b.empty()) throw validation_error("covariate split declared twice");
        std::set<double> seen;
        for (const double t : split.times) {
            if (!(t > 0.0) || !(t < cuts.back()))
                throw validation_error("split time " + short_number(t) +
                                       " outside the follow-up window");
            if (!std::binary_search(cuts.begin(), cuts.end(), t))
                throw validation_error("split time " + short_number(t) + " is not a cut point");
            if (!seen.insert(t).second)
                throw validation_error("duplicate split time " + short_number(t));
        }
        b.assign(seen.begin(), seen.end());
    }

    TimeVaryingDataset out;
    out.time = data.time;
    out.event = data.event;
    out.subject = data.subject;
    out.cut_points = cuts;
    std::vector<ColumnMapEntry> map;

    for (std::size_t j = 0; j < data.n_covariates(); ++j) {
        const ScheduledCovariate& src = data.covariates[j];
        if (boundaries[j].empty()) {
            ColumnMapEntry entry;
            entry.column = out.covariates.size();
            entry.source = j;
            entry.name = src.name;
            entry.source_name = src.name;
            entry.window = -1;
            entry.window_start = cuts.front();
            entry.window_end = cuts.back();
            map.push_back(entry);
            out.covariates.push_back(src);
            continue;
        }
        std::vector<double> edges{cuts.front()};
        edges.insert(edges.end(), boundaries[j].begin(), boundaries[j].end());
        edges.push_back(cuts.back());
        for (std::size_t w = 0; w + 1 < edges.size(); ++w) {
            ScheduledCovariate widened;
            const bool last = w + 2 == edges.size();
            widened.name = window_name(src.name, edges[w], edges[w + 1], last);
            widened.by_interval.resize(k_count);
            for (std::size_t k = 0; k < k_count; ++k) {
                if (cuts[k] >= edges[w] && cuts[k] < edges[w + 1])
                    widened.by_interval[k] = src.by_interval[k];
            }
            ColumnMapEntry entry;
            entry.column = out.covariates.size();
            entry.source = j;
            entry.name = widened.name;
            entry.source_name = src.name;
            entry.window = static_cast<int>(w);
            entry.window_start = edges[w];
            entry.window_end = edges[w + 1];
            map.push_back(entry);
            out.covariates.push_back(std::move(widened));
        }
    }
    return {std::move(out), std::move(map)};
}

SurvivalDataset augment_to_strata(const TimeVaryingDataset& data) {
    validate(data);
    const auto& cuts = data.cut_points;
    const std::size_t n = data.n_subjects();
    const std::size_t k_count = data.n_intervals();
    for (std::size_t i = 0; i < n; ++i) {
        if (data.time[i] > cuts.back())
            throw validation_error("cut points do not cover follow-up of subject " +
                                   std::to_string(data.subject[i]));
    }

    SurvivalDataset out;
    out.columns.resize(data.n_covariates());
    for (std::size_t j = 0; j < data.n_covariates(); ++j)
        out.covariate_names.push_back(data.covariates[j].name);

    // Interval-major emission: all rows of interval 1, then interval 2, ...
    // Within an interval subjects keep their input order, so augmented column
    // indices come out strictly increasing without a sort.
    std::vector<std::int64_t> rank(n);
    for (std::size_t k = 1; k <= k_count; ++k) {
        const std::int64_t offset = static_cast<std::int64_t>(out.n_rows());
        std::int64_t emitted = 0;
        for (std::size_t i = 0; i < n; ++i) {
            rank[i] = -1;
            if (!at_risk_in_interval(data.time[i], data.event[i], static_cast<int>(k), cuts))
                continue;
            rank[i] = offset + emitted++;
            out.time.push_back(std::min(data.time[i], cuts[k]));
            out.event.push_back(
                data.event[i] && event_interval(data.time[i], cuts) == static_cast<int>(k)
                    ? std::uint8_t{1}
                    : std::uint8_t{0});
            out.stratum.push_back(static_cast<std::int32_t>(k));
            out.subject.push_back(data.subject[i]);
        }
        for (std::size_t j = 0; j < data.n_covariates(); ++j) {
            const SparseColumn& src = data.covariates[j].by_interval[k - 1];
            for (std::size_t t = 0; t < src.nnz(); ++t) {
                const std::int64_t i = src.rows[t];
                if (rank[static_cast<std::size_t>(i)] >= 0 && src.values[t] != 0.0)
                    out.columns[j].push(rank[static_cast<std::size_t>(i)], src.values[t]);
            }
        }
    }
    return out;
}

LoweredDataset lower_pipeline(const TimeVaryingDataset& data, const TimeVaryingSpec& spec) {
    auto [widened, map] = split_time_varying_coefficient(data, spec);
    LoweredDataset out;
    out.data = augment_to_strata(widened);
    out.column_map = std::move(map);
    return out;
}

double time_varying_log_likelihood(const TimeVaryingDataset& data, std::span<const double> beta) {
    validate(data);
    if (beta.size() != data.n_covariates())
        throw validation_error("beta length does not match covariate count");
    const std::size_t n = data.n_subjects();
    const std::size_t k_count = data.n_intervals();

    // Dense linear predictor per interval: eta[k][r] = x_r(interval k)' beta.
    std::vector<std::vector<double>> eta(k_count, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < data.n_covariates(); ++j) {
        for (std::size_t k = 0; k < k_count; ++k) {
            const SparseColumn& col = data.covariates[j].by_interval[k];
            for (std::size_t t = 0; t < col.nnz(); ++t)
                eta[k][static_cast<std::size_t>(col.rows[t])] += col.values[t] * beta[j];
        }
    }

    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!data.event[i]) continue;
        const int k = event_interval(data.time[i], data.cut_points);
        const auto& eta_k = eta[static_cast<std::size_t>(k - 1)];
        double den = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (data.time[r] >= data.time[i]) den += std::exp(eta_k[r]);
        }
        ll += eta_k[i] - std::log(den);
    }
    return ll;
}

}  // namespace stratcox
