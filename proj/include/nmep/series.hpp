#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nmep/core.hpp"

namespace nmep {

/// Recorded trajectory of ensemble observables. One record per sampled time;
/// observables[r][k] belongs to observable_names[k].
struct TimeSeries {
    std::vector<std::string> observable_names;
    std::vector<double> times;
    std::vector<std::vector<cplx>> observables;
    std::vector<std::size_t> distinct_members;
    std::vector<std::int64_t> total_counts;
    std::vector<double> min_eigenvalues; // empty unless positivity is monitored

    bool terminated = false;
    std::string termination_reason;
    double termination_time = 0.0;
};

/// CSV layout: t, then per observable a real column named after it plus an
/// <name>_im column when any imaginary part exceeds 1e-10, then
/// n_distinct_members, total_count and (if monitored) min_eigenvalue.
/// Doubles use the shortest round-trip form. An early stop appends
/// "# terminated: <reason> at t=<t>".
void write_csv(std::ostream& out, const TimeSeries& s);
void write_csv_file(const std::string& path, const TimeSeries& s);

/// Parsed numeric CSV, used by the comparison command.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows; // rows[r][c]
    std::optional<std::string> trailing_comment;

    std::size_t column_index(const std::string& name) const; // throws OutOfRange
};

CsvTable read_csv(std::istream& in, const std::string& name);
CsvTable read_csv_file(const std::string& path);

} // namespace nmep
