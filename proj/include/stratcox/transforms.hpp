#pragma once

// Lowering transforms: a Cox model with time-varying coefficients becomes one
// with time-varying covariates by splitting columns across effect windows, and
// the latter becomes a stratified Cox model by augmenting each subject into
// one row per time interval it is at risk in.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stratcox/data.hpp"

namespace stratcox {

struct TimeVaryingSpec {
    std::vector<double> cut_points;  // t0 = 0 < t1 < ... < tK

    struct Split {
        std::size_t covariate = 0;
        std::vector<double> times;  // each in (0, tK) and among cut_points
    };
    std::vector<Split> splits;
};

// One covariate as a per-interval value source. Entries exist only for
// subjects at risk in the interval.
struct ScheduledCovariate {
    std::string name;
    std::vector<SparseColumn> by_interval;  // size K
};

// Subjects with observed time, event flag, and piecewise-constant covariates
// over the model's time intervals.
struct TimeVaryingDataset {
    std::vector<double> time;
    std::vector<std::uint8_t> event;
    std::vector<std::int64_t> subject;
    std::vector<double> cut_points;
    std::vector<ScheduledCovariate> covariates;

    std::size_t n_subjects() const { return time.size(); }
    std::size_t n_covariates() const { return covariates.size(); }
    std::size_t n_intervals() const {
        return cut_points.size() < 2 ? 0 : cut_points.size() - 1;
    }
};

// Maps an augmented column back to its source covariate and effect window.
// window = -1 marks a column that was never split (whole follow-up).
struct ColumnMapEntry {
    std::size_t column = 0;
    std::size_t source = 0;
    std::string name;
    std::string source_name;
    int window = -1;
    double window_start = 0.0;
    double window_end = 0.0;
};

// 1-based interval containing y under the half-open convention [t_{k-1}, t_k);
// the last interval is closed on the right so y = tK belongs to interval K.
int event_interval(double y, std::span<const double> cut_points);

// A subject occupies interval k when observed past its start, or when its
// event lands exactly on the interval's start cut point.
bool at_risk_in_interval(double y, std::uint8_t event, int k, std::span<const double> cut_points);

void validate_cut_points(std::span<const double> cut_points);
void validate(const TimeVaryingDataset& data);

// Builds the per-interval schedule for time-fixed covariates: every interval
// sees the same column, restricted to the subjects at risk in it.
TimeVaryingDataset make_time_varying(std::vector<double> time, std::vector<std::uint8_t> event,
                                     std::vector<std::int64_t> subject,
                                     std::vector<SparseColumn> columns,
                                     std::vector<std::string> names,
                                     std::vector<double> cut_points);

// Widens each split covariate into one column per effect window; window w's
// column carries the covariate's values inside the window and zero elsewhere.
// Unsplit covariates pass through. The returned map records the new ordering.
std::pair<TimeVaryingDataset, std::vector<ColumnMapEntry>> split_time_varying_coefficient(
    const TimeVaryingDataset& data, const TimeVaryingSpec& spec);

// Emits one row per (subject, interval at risk), interval-major, with stratum
// = interval index, time = min(Y, t_k) and the event flag placed in the
// interval containing Y. Total events are conserved exactly.
SurvivalDataset augment_to_strata(const TimeVaryingDataset& data);

struct LoweredDataset {
    SurvivalDataset data;
    std::vector<ColumnMapEntry> column_map;
};

LoweredDataset lower_pipeline(const TimeVaryingDataset& data, const TimeVaryingSpec& spec);

// Direct evaluation of the time-varying-covariate partial likelihood over the
// original subjects: every event's risk set is {r : Y_r >= Y_i} with
// covariates read at the event's interval. Serial reference for the
// augmentation path; cost O(n_subjects^2).
double time_varying_log_likelihood(const TimeVaryingDataset& data, std::span<const double> beta);

}  // namespace stratcox
