#ifndef WSLAB_IO_HPP
#define WSLAB_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace wslab {

using json = nlohmann::ordered_json;

/// Shortest text that is guaranteed to round-trip a double (17 significant digits).
inline std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Comma-separated table with a header row and LF line endings.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size())
  {
    require(static_cast<bool>(out_), ErrorCode::io_error, "cannot open " + path.string() + " for writing");
    write_cells(header);
  }

  void row(const std::vector<std::string>& cells)
  {
    require(cells.size() == columns_, ErrorCode::io_error, "CSV row width does not match the header");
    write_cells(cells);
  }

  void row(std::initializer_list<double> values)
  {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
  }

private:
  void write_cells(const std::vector<std::string>& cells)
  {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  std::size_t columns_;
};

inline void write_json(const std::filesystem::path& path, const json& value)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out << value.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io_error, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_config, path.string() + ": " + e.what());
  }
}

/// One-line machine-readable error record.
inline std::string error_line(std::string_view code, const std::string& message)
{
  return json{{"error", code}, {"message", message}}.dump();
}

} // namespace wslab

#endif // WSLAB_IO_HPP
