#include "swiptsec/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace swiptsec {

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> record_columns(bool with_timing) {
  std::vector<std::string> c = {"sweep",  "axis_value", "trial", "seed", "scheme", "status",
                                "provenance", "tx_power_dbm", "secrecy_capacity_bps_hz",
                                "total_harvested_dbm", "rho", "rank_one", "rank_ratio",
                                "prop1_condition", "secrecy_tight", "detail"};
  if (with_timing) c.push_back("solve_ms");
  return c;
}

std::vector<std::string> aggregate_columns() {
  return {"sweep",           "axis_value",          "scheme",
          "trials",          "solved",              "feasibility_rate",
          "mean_tx_power_dbm", "mean_secrecy_bps_hz", "mean_harvested_dbm",
          "rank_one_rate",   "common_trials",       "common_tx_power_dbm",
          "common_secrecy_bps_hz", "common_harvested_dbm"};
}

namespace {

void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(fields[i]);
  }
  os << '\n';
}

double dbm(double w) { return std::isfinite(w) && w > 0.0 ? watt_to_dbm(w) : std::nan(""); }

template <class F>
void to_file(const std::filesystem::path& path, F body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("error writing " + path.string());
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records, bool with_timing) {
  write_row(os, record_columns(with_timing));
  for (const TrialRecord& r : records) {
    std::vector<std::string> f = {to_string(r.axis),
                                  format_number(r.axis_value),
                                  std::to_string(r.trial),
                                  std::to_string(r.seed),
                                  to_string(r.scheme),
                                  to_string(r.status),
                                  to_string(r.provenance),
                                  format_number(r.tx_power_dbm),
                                  format_number(r.secrecy_capacity_bps_hz),
                                  format_number(r.total_harvested_dbm),
                                  r.solved() ? format_number(r.rho) : std::string(),
                                  r.rank_one ? "1" : "0",
                                  format_number(r.rank_ratio),
                                  r.prop1_condition < 0 ? std::string() : std::to_string(r.prop1_condition),
                                  r.secrecy_tight ? "1" : "0",
                                  r.detail};
    if (with_timing) f.push_back(format_number(r.solve_ms));
    write_row(os, f);
  }
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  write_row(os, aggregate_columns());
  for (const AggregateRow& r : rows) {
    write_row(os, {to_string(r.axis), format_number(r.axis_value), to_string(r.scheme),
                   std::to_string(r.trials), std::to_string(r.solved), format_number(r.feasibility_rate),
                   format_number(dbm(r.mean_tx_power_w)), format_number(r.mean_secrecy_bps_hz),
                   format_number(dbm(r.mean_harvested_w)), format_number(r.rank_one_rate),
                   std::to_string(r.common), format_number(dbm(r.common_tx_power_w)),
                   format_number(r.common_secrecy_bps_hz), format_number(dbm(r.common_harvested_w))});
  }
}

void emit_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path, bool with_timing) {
  to_file(path, [&](std::ostream& os) { write_records_csv(os, records, with_timing); });
}

void emit_aggregate_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& os) { write_aggregate_csv(os, rows); });
}

std::vector<std::filesystem::path> emit_figures(const ExperimentConfig& cfg, const SweepResult& result,
                                                const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  auto figure = [&](const std::string& name, SweepAxis axis, auto value) {
    const SweepSpec* spec = nullptr;
    for (const SweepSpec& s : cfg.sweeps)
      if (s.axis == axis) spec = &s;
    if (!spec) return;
    const auto path = dir / name;
    to_file(path, [&](std::ostream& os) {
      std::vector<std::string> header = {to_string(axis)};
      for (SchemeKind k : cfg.schemes) header.push_back(to_string(k));
      header.push_back("common_trials");
      write_row(os, header);
      for (double v : spec->grid) {
        std::vector<std::string> row = {format_number(v)};
        int common = 0;
        for (SchemeKind k : cfg.schemes) {
          std::string cell;
          for (const AggregateRow& a : result.aggregates)
            if (a.axis == axis && a.axis_value == v && a.scheme == k) {
              cell = format_number(value(a));
              common = a.common;
            }
          row.push_back(cell);
        }
        row.push_back(std::to_string(common));
        write_row(os, row);
      }
    });
    written.push_back(path);
  };
  figure("fig2.csv", SweepAxis::GammaReqDb, [](const AggregateRow& a) { return dbm(a.common_tx_power_w); });
  figure("fig3.csv", SweepAxis::GammaReqDb, [](const AggregateRow& a) { return a.common_secrecy_bps_hz; });
  figure("fig4.csv", SweepAxis::GammaReqDb, [](const AggregateRow& a) { return dbm(a.common_harvested_w); });
  figure("fig5.csv", SweepAxis::KReceivers, [](const AggregateRow& a) { return dbm(a.common_tx_power_w); });
  return written;
}

std::vector<std::vector<std::string>> parse_csv(std::istream& is) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (is.peek() == '\n') is.get(c);
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw std::invalid_argument("parse_csv: unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace swiptsec
