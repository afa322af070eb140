#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "swiptsec/harness.hpp"

namespace swiptsec {

/// Quotes a field when it holds a comma, quote, CR or LF (quotes doubled).
std::string csv_escape(std::string_view field);

/// Six significant digits; empty for non-finite values.
std::string format_number(double v);

/// Column order of the per-trial file. `solve_ms` is appended only when
/// timing is requested, since wall-clock time would break reproducibility.
std::vector<std::string> record_columns(bool with_timing = false);
std::vector<std::string> aggregate_columns();

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records, bool with_timing = false);
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

/// File versions; throw std::runtime_error naming the path on failure.
void emit_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path,
              bool with_timing = false);
void emit_aggregate_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);

/// fig2.csv (tx power vs Gamma_req), fig3.csv (secrecy capacity), fig4.csv
/// (total harvested power) from the Gamma_req sweep and fig5.csv (tx power
/// vs K) from the K sweep, one column per scheme. Powers are averaged in
/// watt over the trials every scheme solved, then converted to dBm.
/// Returns the files written.
std::vector<std::filesystem::path> emit_figures(const ExperimentConfig& cfg, const SweepResult& result,
                                                const std::filesystem::path& dir);

/// RFC-4180 reader (quoted fields may hold commas, quotes and newlines).
std::vector<std::vector<std::string>> parse_csv(std::istream& is);

}  // namespace swiptsec
