#include "bipro/csv.h"

#include <fstream>
#include <sstream>

#include "bipro/errors.h"

namespace bipro::csv {
namespace {

// Parses one record starting at the current stream position; handles quoted
// fields spanning newlines. Returns false on EOF with nothing read.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  while (true) {
    if (c == EOF) {
      fields.push_back(field);
      return true;
    }
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        int next = in.peek();
        if (next == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_no;
        field += ch;
      }
    } else if (ch == '"' && field.empty() && !any) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
      any = false;
      c = in.get();
      continue;
    } else if (ch == '\n') {
      ++line_no;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(field);
      return true;
    } else {
      field += ch;
      any = true;
    }
    c = in.get();
  }
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InputError("missing CSV column \"" + name + "\"");
}

Table read(std::istream& in, const std::string& origin) {
  Table table;
  std::size_t line_no = 1;
  std::vector<std::string> fields;
  if (!read_record(in, fields, line_no)) {
    throw ParseError(origin + ": empty CSV");
  }
  table.header = fields;
  while (read_record(in, fields, line_no)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.header.size()) {
      throw ParseError(origin + ": row has " + std::to_string(fields.size()) +
                           " fields, header has " + std::to_string(table.header.size()),
                       line_no);
    }
    table.rows.push_back(fields);
  }
  return table;
}

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV file: " + path);
  return read(in, path);
}

std::string escape(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace bipro::csv
