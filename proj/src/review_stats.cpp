#include "bipro/review_stats.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bipro/csv.h"
#include "bipro/errors.h"

namespace bipro {
namespace {

int parse_int(const std::string& text, const std::string& column, std::size_t row) {
  try {
    std::size_t consumed = 0;
    int value = std::stoi(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument("trailing");
    return value;
  } catch (const std::exception&) {
    throw ParseError("column \"" + column + "\" row " + std::to_string(row) +
                     ": expected an integer, got \"" + text + "\"");
  }
}

// Running mean/M2 accumulator (Welford).
struct Accumulator {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  MetricStats stats() const {
    MetricStats s;
    s.n = n;
    s.mean = mean;
    s.stddev = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
    return s;
  }
};

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

}  // namespace

std::vector<ReviewRecord> read_reviews_csv(std::istream& in, const std::string& origin) {
  csv::Table table = csv::read(in, origin);
  std::size_t reviewer = table.column("reviewer_id");
  std::size_t poem = table.column("poem_id");
  std::size_t format = table.column("format");
  std::size_t informativeness = table.column("informativeness");
  std::size_t relevance = table.column("relevance");
  std::size_t aesthetics = table.column("aesthetics");
  std::size_t overall = table.column("overall");
  std::size_t predicted = table.column("predicted");

  std::vector<ReviewRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    ReviewRecord r;
    r.reviewer_id = row[reviewer];
    r.poem_id = row[poem];
    r.format_score = parse_int(row[format], "format", i + 2);
    r.informativeness = parse_int(row[informativeness], "informativeness", i + 2);
    r.relevance = parse_int(row[relevance], "relevance", i + 2);
    r.aesthetics = parse_int(row[aesthetics], "aesthetics", i + 2);
    r.overall = parse_int(row[overall], "overall", i + 2);
    r.predicted_overall = parse_int(row[predicted], "predicted", i + 2);
    r.validate();
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ReviewRecord> read_reviews_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open reviews file: " + path);
  return read_reviews_csv(in, path);
}

PoemManifest read_manifest_csv(std::istream& in, const std::string& origin) {
  csv::Table table = csv::read(in, origin);
  std::size_t poem = table.column("poem_id");
  std::size_t system = table.column("system");
  std::size_t title = table.column("title");
  std::size_t format = table.column("format");
  PoemManifest manifest;
  for (const auto& row : table.rows) {
    manifest[row[poem]] = PoemInfo{row[system], row[title], row[format]};
  }
  return manifest;
}

PoemManifest read_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest file: " + path);
  return read_manifest_csv(in, path);
}

std::map<std::string, double> per_poem_ar(std::span<const ReviewRecord> records) {
  std::map<std::string, std::vector<ReviewRecord>> by_poem;
  for (const ReviewRecord& r : records) by_poem[r.poem_id].push_back(r);
  std::map<std::string, double> out;
  for (const auto& [poem_id, rows] : by_poem) out[poem_id] = ar_score(rows);
  return out;
}

std::vector<SystemStats> aggregate_stats(std::span<const ReviewRecord> records,
                                         const PoemManifest& manifest) {
  struct SystemAccum {
    Accumulator format, informativeness, relevance, aesthetics, overall;
    std::int64_t record_count = 0;
  };
  std::map<std::string, SystemAccum> by_system;
  for (const ReviewRecord& r : records) {
    auto it = manifest.find(r.poem_id);
    if (it == manifest.end()) {
      throw InputError("poem_id \"" + r.poem_id + "\" not in the poems manifest");
    }
    SystemAccum& acc = by_system[it->second.system];
    acc.format.add(r.format_score);
    acc.informativeness.add(r.informativeness);
    acc.relevance.add(r.relevance);
    acc.aesthetics.add(r.aesthetics);
    acc.overall.add(r.overall);
    ++acc.record_count;
  }

  // AR is computed per poem, then averaged within each system.
  std::map<std::string, double> poem_ar = per_poem_ar(records);
  std::map<std::string, std::pair<double, std::int64_t>> system_ar;
  for (const auto& [poem_id, ar] : poem_ar) {
    const std::string& system = manifest.at(poem_id).system;
    auto& [sum, count] = system_ar[system];
    sum += ar;
    ++count;
  }

  std::vector<SystemStats> out;
  for (const auto& [system, acc] : by_system) {
    SystemStats s;
    s.system = system;
    s.record_count = acc.record_count;
    s.format_score = acc.format.stats();
    s.informativeness = acc.informativeness.stats();
    s.relevance = acc.relevance.stats();
    s.aesthetics = acc.aesthetics.stats();
    s.overall = acc.overall.stats();
    const auto& [ar_sum, poem_count] = system_ar.at(system);
    s.poem_count = poem_count;
    s.ar_mean = ar_sum / static_cast<double>(poem_count);
    out.push_back(std::move(s));
  }
  return out;
}

void write_stats_csv(std::ostream& out, std::span<const SystemStats> stats) {
  out << "system,poems,records,"
         "format_mean,format_std,informativeness_mean,informativeness_std,"
         "relevance_mean,relevance_std,aesthetics_mean,aesthetics_std,"
         "overall_mean,overall_std,ar_mean\n";
  for (const SystemStats& s : stats) {
    out << csv::escape(s.system) << ',' << s.poem_count << ',' << s.record_count << ','
        << fixed6(s.format_score.mean) << ',' << fixed6(s.format_score.stddev) << ','
        << fixed6(s.informativeness.mean) << ',' << fixed6(s.informativeness.stddev) << ','
        << fixed6(s.relevance.mean) << ',' << fixed6(s.relevance.stddev) << ','
        << fixed6(s.aesthetics.mean) << ',' << fixed6(s.aesthetics.stddev) << ','
        << fixed6(s.overall.mean) << ',' << fixed6(s.overall.stddev) << ','
        << fixed6(s.ar_mean) << '\n';
  }
}

}  // namespace bipro
