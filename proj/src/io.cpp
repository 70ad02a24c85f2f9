#include "stratcox/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace stratcox {

namespace {

constexpr const char* kWideHeader = "subject,stratum,time,event,covariates";
constexpr const char* kLongHeader = "subject,start,stop,event,covariates";

[[noreturn]] void fail_line(const std::string& path, std::size_t line, const std::string& what) {
    throw validation_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double_field(std::string_view text, const std::string& path, std::size_t line,
                          const char* what) {
    const std::string_view t = trim(text);
    double value = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        fail_line(path, line, std::string("cannot parse ") + what + " '" + std::string(t) + "'");
    return value;
}

std::int64_t parse_int_field(std::string_view text, const std::string& path, std::size_t line,
                             const char* what) {
    const std::string_view t = trim(text);
    std::int64_t value = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        fail_line(path, line, std::string("cannot parse ") + what + " '" + std::string(t) + "'");
    return value;
}

std::uint8_t parse_event_field(std::string_view text, const std::string& path, std::size_t line) {
    const std::int64_t v = parse_int_field(text, path, line, "event flag");
    if (v != 0 && v != 1) fail_line(path, line, "event flag must be 0 or 1");
    return static_cast<std::uint8_t>(v);
}

// Splits off the first `count` comma fields; the remainder (which may itself
// contain commas inside covariate names) stays as the last element.
std::vector<std::string_view> split_fields(std::string_view s, std::size_t count,
                                           const std::string& path, std::size_t line) {
    std::vector<std::string_view> fields;
    for (std::size_t i = 0; i + 1 < count; ++i) {
        const std::size_t pos = s.find(',');
        if (pos == std::string_view::npos) fail_line(path, line, "too few fields");
        fields.push_back(s.substr(0, pos));
        s.remove_prefix(pos + 1);
    }
    fields.push_back(s);
    return fields;
}

// name:value tokens separated by spaces; value split on the last ':'.
template <class Sink>
void parse_covariate_tokens(std::string_view cell, const std::string& path, std::size_t line,
                            Sink&& sink) {
    cell = trim(cell);
    while (!cell.empty()) {
        std::size_t sp = cell.find(' ');
        std::string_view token = sp == std::string_view::npos ? cell : cell.substr(0, sp);
        cell.remove_prefix(sp == std::string_view::npos ? cell.size() : sp + 1);
        token = trim(token);
        if (token.empty()) continue;
        const std::size_t colon = token.rfind(':');
        if (colon == std::string_view::npos || colon == 0)
            fail_line(path, line, "malformed covariate token '" + std::string(token) + "'");
        const std::string name(token.substr(0, colon));
        const double value = parse_double_field(token.substr(colon + 1), path, line, "covariate value");
        if (!std::isfinite(value)) fail_line(path, line, "non-finite covariate value");
        sink(name, value);
    }
}

class NameIndex {
  public:
    std::size_t at(const std::string& name) {
        const auto [it, inserted] = index_.try_emplace(name, names_.size());
        if (inserted) names_.push_back(name);
        return it->second;
    }
    std::vector<std::string> take_names() { return std::move(names_); }

  private:
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> names_;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write " + path);
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

SurvivalDataset read_wide_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw validation_error(path + ": empty file");
    if (std::string(trim(line)) != kWideHeader)
        throw validation_error(path + ":1: expected wide header '" + kWideHeader + "'");

    SurvivalDataset data;
    NameIndex covariates;
    NameIndex strata;
    std::vector<std::vector<std::pair<std::int64_t, double>>> entries;
    std::vector<std::int32_t> raw_stratum;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line, 5, path, line_no);
        const std::int64_t row = static_cast<std::int64_t>(data.time.size());
        data.subject.push_back(parse_int_field(fields[0], path, line_no, "subject"));
        raw_stratum.push_back(
            static_cast<std::int32_t>(strata.at(std::string(trim(fields[1])))) + 1);
        const double t = parse_double_field(fields[2], path, line_no, "time");
        if (!std::isfinite(t) || t < 0.0) fail_line(path, line_no, "time must be finite and >= 0");
        data.time.push_back(t);
        data.event.push_back(parse_event_field(fields[3], path, line_no));
        std::set<std::string> seen;
        parse_covariate_tokens(fields[4], path, line_no, [&](const std::string& name, double value) {
            if (!seen.insert(name).second)
                fail_line(path, line_no, "duplicate covariate '" + name + "'");
            const std::size_t j = covariates.at(name);  // a zero still declares the covariate
            if (value == 0.0) return;                   // but is never stored
            if (entries.size() <= j) entries.resize(j + 1);
            entries[j].emplace_back(row, value);
        });
    }
    if (data.time.empty()) throw validation_error(path + ": no rows");

    // Density of stratum labels: relabel 1..K ordered by label (numeric when
    // every label parses as a number, lexicographic otherwise).
    std::vector<std::string> labels = strata.take_names();
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    bool numeric = true;
    std::vector<double> as_number(labels.size(), 0.0);
    for (std::size_t i = 0; i < labels.size() && numeric; ++i) {
        const auto res = std::from_chars(labels[i].data(), labels[i].data() + labels[i].size(),
                                         as_number[i]);
        numeric = res.ec == std::errc{} && res.ptr == labels[i].data() + labels[i].size();
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return numeric ? as_number[a] < as_number[b] : labels[a] < labels[b];
    });
    std::vector<std::int32_t> remap(labels.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        remap[order[rank]] = static_cast<std::int32_t>(rank + 1);
        data.stratum_labels.push_back(labels[order[rank]]);
    }
    data.stratum.reserve(raw_stratum.size());
    for (const std::int32_t s : raw_stratum)
        data.stratum.push_back(remap[static_cast<std::size_t>(s - 1)]);

    data.covariate_names = covariates.take_names();
    data.columns.resize(data.covariate_names.size());
    for (std::size_t j = 0; j < data.columns.size(); ++j) {
        if (j < entries.size()) {
            for (const auto& [row, value] : entries[j]) data.columns[j].push(row, value);
        }
    }
    sort_columns_by_name(data);  // files are canonical: columns in name order
    validate_invariants(data);
    return data;
}

void write_wide_csv(const std::string& path, const SurvivalDataset& data) {
    validate_invariants(data);
    std::ofstream out = open_output(path);
    out << kWideHeader << "\n";
    // Row-major token assembly from the column-major store, with tokens in
    // name order so write -> read -> write is byte-identical.
    std::vector<std::size_t> by_name(data.n_covariates());
    for (std::size_t j = 0; j < by_name.size(); ++j) by_name[j] = j;
    std::sort(by_name.begin(), by_name.end(), [&](std::size_t a, std::size_t b) {
        return data.covariate_name(a) < data.covariate_name(b);
    });
    std::vector<std::vector<std::pair<std::size_t, double>>> by_row(data.n_rows());
    for (const std::size_t j : by_name) {
        const SparseColumn& col = data.columns[j];
        for (std::size_t t = 0; t < col.nnz(); ++t)
            by_row[static_cast<std::size_t>(col.rows[t])].emplace_back(j, col.values[t]);
    }
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        out << data.subject[i] << ',' << data.stratum_label(data.stratum[i]) << ','
            << format_double(data.time[i]) << ',' << int(data.event[i]) << ',';
        for (std::size_t t = 0; t < by_row[i].size(); ++t) {
            if (t) out << ' ';
            out << data.covariate_name(by_row[i][t].first) << ':'
                << format_double(by_row[i][t].second);
        }
        out << '\n';
    }
}

LongData read_long_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw validation_error(path + ": empty file");
    if (std::string(trim(line)) != kLongHeader)
        throw validation_error(path + ":1: expected long header '" + kLongHeader + "'");

    LongData data;
    NameIndex covariates;
    std::unordered_map<std::int64_t, std::size_t> subject_slot;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line, 5, path, line_no);
        LongRecord record;
        record.subject = parse_int_field(fields[0], path, line_no, "subject");
        record.start = parse_double_field(fields[1], path, line_no, "interval start");
        record.stop = parse_double_field(fields[2], path, line_no, "interval stop");
        record.event = parse_event_field(fields[3], path, line_no);
        if (!std::isfinite(record.start) || !std::isfinite(record.stop) || record.start < 0.0)
            fail_line(path, line_no, "interval bounds must be finite and non-negative");
        if (!(record.start < record.stop))
            fail_line(path, line_no, "interval start must precede interval stop");
        parse_covariate_tokens(fields[4], path, line_no, [&](const std::string& name, double value) {
            if (value != 0.0) record.values.emplace_back(covariates.at(name), value);
        });

        const auto [it, inserted] = subject_slot.try_emplace(record.subject, data.subjects.size());
        if (inserted) data.subjects.emplace_back();
        auto& records = data.subjects[it->second];
        if (records.empty()) {
            if (record.start != 0.0)
                fail_line(path, line_no, "first interval of subject " +
                                             std::to_string(record.subject) + " must start at 0");
        } else {
            if (records.back().event)
                fail_line(path, line_no, "subject " + std::to_string(record.subject) +
                                             " has records after its event");
            if (record.start != records.back().stop)
                fail_line(path, line_no, "intervals of subject " + std::to_string(record.subject) +
                                             " must be contiguous");
        }
        data.max_stop = std::max(data.max_stop, record.stop);
        records.push_back(std::move(record));
    }
    if (data.subjects.empty()) throw validation_error(path + ": no rows");
    data.covariate_names = covariates.take_names();
    return data;
}

void write_long_csv(const std::string& path, const LongData& data) {
    std::ofstream out = open_output(path);
    out << kLongHeader << "\n";
    for (const auto& records : data.subjects) {
        for (const LongRecord& record : records) {
            out << record.subject << ',' << format_double(record.start) << ','
                << format_double(record.stop) << ',' << int(record.event) << ',';
            for (std::size_t t = 0; t < record.values.size(); ++t) {
                if (t) out << ' ';
                out << data.covariate_names[record.values[t].first] << ':'
                    << format_double(record.values[t].second);
            }
            out << '\n';
        }
    }
}

TimeVaryingDataset to_time_varying(const LongData& data, std::vector<double> cut_points) {
    validate_cut_points(cut_points);
    const std::size_t n = data.subjects.size();
    const std::size_t p = data.covariate_names.size();
    const std::size_t k_count = cut_points.size() - 1;

    TimeVaryingDataset out;
    out.cut_points = cut_points;
    out.time.resize(n);
    out.event.resize(n);
    out.subject.resize(n);
    out.covariates.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        out.covariates[j].name = data.covariate_names[j];
        out.covariates[j].by_interval.resize(k_count);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto& records = data.subjects[i];
        out.subject[i] = records.front().subject;
        out.time[i] = records.back().stop;
        out.event[i] = records.back().event;
        if (out.time[i] > cut_points.back())
            throw validation_error("cut points do not cover follow-up of subject " +
                                   std::to_string(out.subject[i]));
        for (std::size_t r = 1; r < records.size(); ++r) {
            if (!std::binary_search(cut_points.begin(), cut_points.end(), records[r].start))
                throw validation_error("covariate change at time " +
                                       format_double(records[r].start) + " of subject " +
                                       std::to_string(out.subject[i]) +
                                       " does not align with a cut point");
        }
        for (std::size_t k = 1; k <= k_count; ++k) {
            if (!at_risk_in_interval(out.time[i], out.event[i], static_cast<int>(k), cut_points))
                continue;
            // Record whose span covers the interval start; the final record
            // covers the boundary case of an event exactly at a cut point.
            const double at = cut_points[k - 1];
            const LongRecord* source = &records.back();
            for (const LongRecord& record : records) {
                if (record.start <= at && at < record.stop) {
                    source = &record;
                    break;
                }
            }
            for (const auto& [j, value] : source->values)
                out.covariates[j].by_interval[k - 1].push(static_cast<std::int64_t>(i), value);
        }
    }
    return out;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
    std::ifstream in = open_input(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str(), path);
}

ConfigMap ConfigMap::from_string(const std::string& text, const std::string& origin) {
    ConfigMap config;
    config.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body(line);
        const std::size_t hash = body.find('#');
        if (hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            fail_line(origin, line_no, "expected key = value");
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        if (key.empty()) fail_line(origin, line_no, "empty key");
        if (!config.values_.emplace(key, value).second)
            fail_line(origin, line_no, "duplicate key '" + key + "'");
    }
    return config;
}

bool ConfigMap::has(const std::string& key) const { return values_.count(key) > 0; }

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_double_field(it->second, origin_, 0, key.c_str());
}

std::int64_t ConfigMap::get_int(const std::string& key, std::int64_t fallback) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_int_field(it->second, origin_, 0, key.c_str());
}

std::vector<double> ConfigMap::get_double_list(const std::string& key) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    std::vector<double> out;
    if (it == values_.end()) return out;
    std::string_view rest(it->second);
    while (!rest.empty()) {
        const std::size_t comma = rest.find(',');
        const std::string_view piece =
            trim(comma == std::string_view::npos ? rest : rest.substr(0, comma));
        rest.remove_prefix(comma == std::string_view::npos ? rest.size() : comma + 1);
        if (piece.empty()) continue;
        out.push_back(parse_double_field(piece, origin_, 0, key.c_str()));
    }
    return out;
}

std::vector<std::string> ConfigMap::get_string_list(const std::string& key) {
    consumed_.insert(key);
    const auto it = values_.find(key);
    std::vector<std::string> out;
    if (it == values_.end()) return out;
    std::string_view rest(it->second);
    while (!rest.empty()) {
        const std::size_t comma = rest.find(',');
        const std::string_view piece =
            trim(comma == std::string_view::npos ? rest : rest.substr(0, comma));
        rest.remove_prefix(comma == std::string_view::npos ? rest.size() : comma + 1);
        if (!piece.empty()) out.emplace_back(piece);
    }
    return out;
}

void ConfigMap::finish() const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
        if (!consumed_.count(key)) unknown += unknown.empty() ? key : ", " + key;
    }
    if (!unknown.empty())
        throw validation_error(origin_ + ": unknown config key(s): " + unknown);
}

void write_coefficients_csv(const std::string& path, const std::vector<CoefficientRow>& rows) {
    std::ofstream out = open_output(path);
    bool any_interval = false;
    for (const auto& row : rows) any_interval |= row.has_interval;
    out << (any_interval ? "name,beta,hazard_ratio,lower,upper" : "name,beta,hazard_ratio")
        << "\n";
    for (const auto& row : rows) {
        out << row.name << ',' << format_double(row.beta) << ','
            << format_double(std::exp(row.beta));
        if (any_interval) {
            out << ',';
            if (row.has_interval)
                out << format_double(row.lower) << ',' << format_double(row.upper);
            else
                out << ',';
        }
        out << '\n';
    }
}

void write_key_value_csv(const std::string& path,
                         const std::vector<std::pair<std::string, std::string>>& rows) {
    std::ofstream out = open_output(path);
    out << "key,value\n";
    for (const auto& [key, value] : rows) out << key << ',' << value << '\n';
}

void write_cv_csv(const std::string& path, const std::vector<double>& grid,
                  const std::vector<std::vector<double>>& fold_scores) {
    std::ofstream out = open_output(path);
    out << "gamma,fold,score\n";
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (std::size_t f = 0; f < fold_scores[g].size(); ++f) {
            out << format_double(grid[g]) << ',' << f << ','
                << format_double(fold_scores[g][f]) << '\n';
        }
    }
}

void write_column_map_csv(const std::string& path, const std::vector<ColumnMapEntry>& map) {
    std::ofstream out = open_output(path);
    out << "column,name,source,source_name,window,window_start,window_end\n";
    for (const auto& entry : map) {
        out << entry.column << ',' << entry.name << ',' << entry.source << ','
            << entry.source_name << ',' << entry.window << ','
            << format_double(entry.window_start) << ',' << format_double(entry.window_end)
            << '\n';
    }
}

void write_trace_csv(const std::string& path, const std::vector<double>& objective_trace) {
    std::ofstream out = open_output(path);
    out << "cycle,objective\n";
    for (std::size_t c = 0; c < objective_trace.size(); ++c)
        out << c << ',' << format_double(objective_trace[c]) << '\n';
}

}  // namespace stratcox
