#ifndef BIPRO_CSV_H_
#define BIPRO_CSV_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace bipro::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws InputError naming the column when it
  /// is missing.
  std::size_t column(const std::string& name) const;
};

/// Minimal RFC-4180-ish reader: comma separated, double quotes for fields
/// containing commas/quotes/newlines. First row is the header.
Table read(std::istream& in, const std::string& origin);
Table read_file(const std::string& path);

/// Quotes a field only when needed.
std::string escape(const std::string& field);

}  // namespace bipro::csv

#endif  // BIPRO_CSV_H_
