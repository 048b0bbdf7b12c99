#ifndef HJLAB_CSV_HPP
#define HJLAB_CSV_HPP

#include <string>
#include <vector>

namespace hjlab {

// Minimal RFC-4180 CSV support: comma separator, CRLF-or-LF tolerant reader,
// fields quoted only when needed, deterministic numeric formatting via fmt_g.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_escape(const std::string& field);
std::string csv_line(const std::vector<std::string>& fields);
CsvTable csv_read_file(const std::string& path);
void csv_write_file(const std::string& path, const CsvTable& t);

}  // namespace hjlab

#endif
