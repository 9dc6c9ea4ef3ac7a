#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "survplaus/data.hpp"

namespace survplaus {

class csv_error : public std::runtime_error {
 public:
  explicit csv_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace detail

// Reads a headered CSV with `time` (positive decimal) and `status` (0/1)
// columns; any other columns are ignored. The censoring side is not part of
// the file format, it comes from the caller. Errors carry the 1-based line
// number (the header is line 1).
inline SurvivalDataset parse_dataset(std::istream& in, CensoringSide side,
                                     const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) {
    throw csv_error(source + ": empty file");
  }
  const auto header = detail::split_csv_line(line);
  std::ptrdiff_t time_col = -1, status_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "time") time_col = static_cast<std::ptrdiff_t>(i);
    if (header[i] == "status") status_col = static_cast<std::ptrdiff_t>(i);
  }
  if (time_col < 0 || status_col < 0) {
    throw csv_error(source + ": header must name `time` and `status` columns");
  }

  std::vector<CensoredObservation> obs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const auto where = source + ": row " + std::to_string(line_no);
    const std::size_t needed =
        static_cast<std::size_t>(std::max(time_col, status_col)) + 1;
    if (fields.size() < needed) {
      throw csv_error(where + ": expected at least " + std::to_string(needed) +
                      " fields, got " + std::to_string(fields.size()));
    }
    CensoredObservation o;
    try {
      std::size_t used = 0;
      o.time = std::stod(fields[static_cast<std::size_t>(time_col)], &used);
      if (used != fields[static_cast<std::size_t>(time_col)].size()) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw csv_error(where + ": cannot parse time value `" +
                      fields[static_cast<std::size_t>(time_col)] + "`");
    }
    if (!(o.time > 0.0)) {
      throw csv_error(where + ": time must be positive, got `" +
                      fields[static_cast<std::size_t>(time_col)] + "`");
    }
    const std::string& s = fields[static_cast<std::size_t>(status_col)];
    if (s == "0") {
      o.status = 0;
    } else if (s == "1") {
      o.status = 1;
    } else {
      throw csv_error(where + ": status must be 0 or 1, got `" + s + "`");
    }
    obs.push_back(o);
  }
  if (obs.empty()) {
    throw csv_error(source + ": no data rows");
  }
  return SurvivalDataset(std::move(obs), side);
}

inline SurvivalDataset parse_dataset_file(const std::string& path,
                                          CensoringSide side) {
  std::ifstream in(path);
  if (!in) throw csv_error(path + ": cannot open file");
  return parse_dataset(in, side, path);
}

}  // namespace survplaus
