#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pfq {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

// One command's tabular result. Every row has one cell per column; summary entries
// come after the table.
struct Table {
  std::vector<std::string> header;  // "key=value" lines describing the run
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> summary;

  const std::string& cell(std::size_t row, const std::string& column) const;
  std::string summary_value(const std::string& key) const;
};

enum class OutputFormat { Csv, Records };

// CSV: '#'-prefixed header lines, a column line, the rows, then "# summary key=value" lines.
// Records: the same header, then one block of "key=value" lines per row, blocks separated
// by blank lines, and a final block with "summary.key=value".
std::string write_table(const Table& t, OutputFormat format);
Table parse_table(const std::string& text, OutputFormat format);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string config_hash(const std::string& resolved_config);

// Full front end. Reads args as given (argv[0] is the program name) and writes results to
// `out` unless an output path is configured. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace pfq
