#pragma once

// On-disk formats. Two UTF-8 CSV layouts distinguished by their header line:
//
//   wide (stratified rows):  subject,stratum,time,event,covariates
//   long (time-varying):     subject,start,stop,event,covariates
//
// The covariates cell holds space-separated name:value tokens; zeros are
// never stored. Configuration files are flat `key = value` text; unknown keys
// are hard errors.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stratcox/data.hpp"
#include "stratcox/transforms.hpp"

namespace stratcox {

// Shortest round-trip decimal form (std::to_chars).
std::string format_double(double value);

SurvivalDataset read_wide_csv(const std::string& path);
void write_wide_csv(const std::string& path, const SurvivalDataset& data);

struct LongRecord {
    std::int64_t subject = 0;
    double start = 0.0;
    double stop = 0.0;
    std::uint8_t event = 0;
    std::vector<std::pair<std::size_t, double>> values;  // (covariate index, value)
};

struct LongData {
    std::vector<std::vector<LongRecord>> subjects;  // records per subject, start-ascending
    std::vector<std::string> covariate_names;
    double max_stop = 0.0;
};

LongData read_long_csv(const std::string& path);

// Builds per-interval schedules. Every internal record boundary must coincide
// with a cut point, otherwise a covariate could change inside an interval.
TimeVaryingDataset to_time_varying(const LongData& data, std::vector<double> cut_points);

void write_long_csv(const std::string& path, const LongData& data);

// Flat key = value configuration with '#' comments. Reads are tracked so that
// finish() can reject unknown keys.
class ConfigMap {
  public:
    static ConfigMap from_file(const std::string& path);
    static ConfigMap from_string(const std::string& text, const std::string& origin = "<config>");

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key, double fallback);
    std::int64_t get_int(const std::string& key, std::int64_t fallback);
    std::vector<double> get_double_list(const std::string& key);           // empty when absent
    std::vector<std::string> get_string_list(const std::string& key);      // empty when absent

    // Throws validation_error naming every key that was never consumed.
    void finish() const;

  private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

struct CoefficientRow {
    std::string name;
    double beta = 0.0;
    bool has_interval = false;
    double lower = 0.0;
    double upper = 0.0;
};

void write_coefficients_csv(const std::string& path, const std::vector<CoefficientRow>& rows);
void write_key_value_csv(const std::string& path,
                         const std::vector<std::pair<std::string, std::string>>& rows);
void write_cv_csv(const std::string& path, const std::vector<double>& grid,
                  const std::vector<std::vector<double>>& fold_scores);
void write_column_map_csv(const std::string& path, const std::vector<ColumnMapEntry>& map);
void write_trace_csv(const std::string& path, const std::vector<double>& objective_trace);

}  // namespace stratcox
