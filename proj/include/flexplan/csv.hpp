#pragma once

#include <string>
#include <vector>

#include "flexplan/common.hpp"

namespace flexplan::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
  int require_column(const std::string& name, const std::string& file) const;
};

/// Reads a numeric CSV with a mandatory header row. Blank lines and lines
/// starting with '#' are skipped. Ragged or non-numeric rows raise an ingest
/// error naming the file, row and column.
Table read_numeric(const std::string& path);

/// All artifact files start with this provenance line so that runs can be
/// traced back to their configuration.
std::string provenance_line(const std::string& config_hash, std::uint64_t seed);

class Writer {
 public:
  Writer(const std::string& path, const std::string& provenance);
  ~Writer();
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

/// Canonical text form of a double: shortest round-trip representation via
/// "%.17g" is not shortest but is byte-stable and exact, which is what the
/// determinism guarantees need.
std::string format_double(double v);

/// FNV-1a 64-bit hash, hex-encoded; used for configuration provenance.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace flexplan::csv
