#include "flexplan/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace flexplan::csv {

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int Table::require_column(const std::string& name, const std::string& file) const {
  const int c = column(name);
  if (c < 0) throw ingest_error(file + ": missing column '" + name + "'");
  return c;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Table read_numeric(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  Table t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (cells.empty()) continue;
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ingest_error(path + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(t.header.size()) + " columns, got " +
                         std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      row[c] = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || *end != '\0') {
        throw ingest_error(path + ":" + std::to_string(lineno) + ": column '" + t.header[c] +
                           "': not a number: '" + cells[c] + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ingest_error(path + ": empty file");
  return t;
}

std::string provenance_line(const std::string& config_hash, std::uint64_t seed) {
  return "# flexplan v" + std::string(kVersion) + " config=" + config_hash +
         " seed=" + std::to_string(seed);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Writer::Impl {
  std::ofstream out;
};

Writer::Writer(const std::string& path, const std::string& provenance) : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    throw io_error("cannot write '" + path + "'");
  }
  impl_->out << provenance << "\n";
}

Writer::~Writer() { delete impl_; }

void Writer::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    impl_->out << (i ? "," : "") << names[i];
  }
  impl_->out << "\n";
}

void Writer::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    impl_->out << (i ? "," : "") << format_double(values[i]);
  }
  impl_->out << "\n";
}

void Writer::raw_row(const std::string& line) { impl_->out << line << "\n"; }

}  // namespace flexplan::csv
