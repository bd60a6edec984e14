#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fracsem::io {

/// IEEE-754 double printed with 17 significant digits ("%.17g").
std::string format_double(double v);

/// "[v0,v1,...]" with format_double for each entry.
std::string json_array(std::span<const double> v);

/// Comma-separated table with a header row.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::span<const double> row);
  void add_row(std::initializer_list<double> row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fracsem::io
