#include "fracsem/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fracsem/error.hpp"

namespace fracsem::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_array(std::span<const double> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    // JSON has no NaN/Inf literals.
    out += std::isfinite(v[i]) ? format_double(v[i]) : std::string("null");
  }
  out += ']';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::span<const double> row) {
  if (row.size() != header_.size()) {
    throw Error(ErrorCode::Validation, "CSV row width does not match header");
  }
  rows_.emplace_back(row.begin(), row.end());
}

void CsvTable::add_row(std::initializer_list<double> row) {
  add_row(std::span<const double>(row.begin(), row.size()));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
  os << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
    os << '\n';
  }
  return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Validation, "cannot open " + path.string() + " for writing");
  out << text;
}

}  // namespace fracsem::io
