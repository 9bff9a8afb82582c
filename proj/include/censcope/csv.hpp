#ifndef CENSCOPE_CSV_HPP
#define CENSCOPE_CSV_HPP

#include <string>
#include <vector>

namespace censcope {

// Round-trip exact float formatting (17 significant digits).
std::string format_double(double v);

// Minimal CSV support: comma-separated, no quoting (none of our fields need it).
std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);
void write_csv(const CsvTable& table, const std::string& path);

}  // namespace censcope

#endif
