#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "colsim/errors.hpp"

namespace colsim {

/// Rectangular table of real values with an ordered metadata block.
/// Serialization contract: '#'-prefixed "key: value" metadata lines, a header
/// row of column names, then one CSV row per data row at full double
/// precision ('.' decimal separator, 17 significant digits).
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size())
      throw ValidationError("ResultTable: row width does not match column count");
    rows.push_back(std::move(row));
  }

  void add_metadata(std::string key, std::string value) {
    metadata.emplace_back(std::move(key), std::move(value));
  }
};

/// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_csv(const ResultTable& table, std::ostream& os) {
  for (const auto& [key, value] : table.metadata) os << "# " << key << ": " << value << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << format_double(row[c]) << (c + 1 < row.size() ? "," : "");
    os << "\n";
  }
}

inline void write_csv_file(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_csv(table, os);
  os.flush();
  if (!os) throw Error("failed while writing " + path.string());
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

inline ResultTable read_csv(std::istream& is) {
  ResultTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header_seen) throw Error("csv: metadata after the header row");
      std::string body = line.substr(1);
      if (!body.empty() && body.front() == ' ') body.erase(0, 1);
      const std::size_t sep = body.find(": ");
      if (sep == std::string::npos)
        table.add_metadata(body, "");
      else
        table.add_metadata(body.substr(0, sep), body.substr(sep + 2));
      continue;
    }
    if (!header_seen) {
      table.columns = detail::split_csv_line(line);
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    for (const std::string& field : detail::split_csv_line(line)) {
      char* end = nullptr;
      row.push_back(std::strtod(field.c_str(), &end));
      if (end == field.c_str()) throw Error("csv: unparsable value '" + field + "'");
    }
    table.add_row(std::move(row));
  }
  if (!header_seen) throw Error("csv: missing header row");
  return table;
}

inline ResultTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string() + " for reading");
  return read_csv(is);
}

namespace detail {

inline std::string metadata_value(const ResultTable& table, const std::string& key) {
  for (const auto& [k, v] : table.metadata)
    if (k == key) return v;
  return "";
}

// Correlation-decay style: |value| vs distance, one curve per leading-column
// group (used by the correlation-profile scenario, where rows are grouped by
// ring order and strength).
inline void grouped_decay_plot(const ResultTable& table, const std::string& csv_name,
                               std::ostream& os) {
  std::vector<std::pair<double, double>> groups;
  for (const auto& row : table.rows) {
    const std::pair<double, double> g{row[0], row[1]};
    bool seen = false;
    for (const auto& known : groups) seen = seen || (known == g);
    if (!seen) groups.push_back(g);
  }
  os << "set xlabel '" << table.columns[2] << "'\n";
  os << "set logscale y\n";
  os << "plot";
  bool first = true;
  for (const auto& [order, strength] : groups) {
    char short_k[32];
    std::snprintf(short_k, sizeof(short_k), "%g", strength);
    for (std::size_t c = 3; c < table.columns.size(); ++c) {
      os << (first ? " " : ", \\\n     ");
      first = false;
      os << "'" << csv_name << "' using (($1==" << format_double(order)
         << " && $2==" << format_double(strength) << ") ? $3 : 1/0):(abs($" << c + 1
         << ")) with linespoints title 'nn" << static_cast<int>(order) << " k=" << short_k
         << " |" << table.columns[c] << "|'";
    }
  }
  os << "\n";
}

}  // namespace detail

/// gnuplot script for the table; by default every column is plotted against
/// the first one. A "plot_style" metadata entry switches to a specialized
/// layout. The CSV is referenced by the given (relative) file name.
inline std::string plot_script_for(const ResultTable& table, const std::string& csv_name,
                                   const std::string& image_name) {
  std::ostringstream os;
  os << "# gnuplot script";
  for (const auto& [key, value] : table.metadata)
    if (key == "scenario") os << " for scenario " << value;
  os << "\n";
  os << "set datafile separator ','\n";
  os << "set key autotitle columnhead\n";
  os << "set grid\n";
  os << "set terminal pngcairo size 1000,700\n";
  os << "set output '" << image_name << "'\n";
  if (detail::metadata_value(table, "plot_style") == "correlation_decay" &&
      table.columns.size() >= 4) {
    detail::grouped_decay_plot(table, csv_name, os);
    return os.str();
  }
  if (!table.columns.empty()) os << "set xlabel '" << table.columns.front() << "'\n";
  os << "plot";
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    os << (c == 1 ? " " : ", \\\n     ");
    os << "'" << csv_name << "' using 1:" << c + 1 << " with linespoints";
  }
  os << "\n";
  return os.str();
}

enum class EmitFormat { Csv, PlotScript };

struct EmitResult {
  std::filesystem::path csv_path;
  std::optional<std::filesystem::path> script_path;
};

/// Writes <stem>.csv (always) and, for the plot-script format, <stem>.gp
/// next to it.
inline EmitResult emit(const ResultTable& table, EmitFormat format,
                       const std::filesystem::path& output_dir, const std::string& stem) {
  EmitResult result;
  result.csv_path = output_dir / (stem + ".csv");
  write_csv_file(table, result.csv_path);
  if (format == EmitFormat::PlotScript) {
    const std::filesystem::path script = output_dir / (stem + ".gp");
    std::ofstream os(script);
    if (!os) throw Error("cannot open " + script.string() + " for writing");
    os << plot_script_for(table, stem + ".csv", stem + ".png");
    if (!os) throw Error("failed while writing " + script.string());
    result.script_path = script;
  }
  return result;
}

}  // namespace colsim
