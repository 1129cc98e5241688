#ifndef BIPRO_REVIEW_STATS_H_
#define BIPRO_REVIEW_STATS_H_

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bipro/answer_ranking.h"

namespace bipro {

struct PoemInfo {
  std::string system;
  std::string title;
  std::string format;
};

/// poem_id -> generating system and metadata.
using PoemManifest = std::map<std::string, PoemInfo>;

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 when n <= 1
  std::int64_t n = 0;
};

struct SystemStats {
  std::string system;
  std::int64_t poem_count = 0;
  std::int64_t record_count = 0;
  MetricStats format_score;
  MetricStats informativeness;
  MetricStats relevance;
  MetricStats aesthetics;
  MetricStats overall;
  double ar_mean = 0.0;  // AR computed per poem, then averaged
};

/// Reviews CSV with header
/// reviewer_id,poem_id,format,informativeness,relevance,aesthetics,overall,predicted.
std::vector<ReviewRecord> read_reviews_csv(std::istream& in, const std::string& origin);
std::vector<ReviewRecord> read_reviews_file(const std::string& path);

/// Manifest CSV with header poem_id,system,title,format.
PoemManifest read_manifest_csv(std::istream& in, const std::string& origin);
PoemManifest read_manifest_file(const std::string& path);

/// AR score of every poem present in `records`, keyed by poem id.
std::map<std::string, double> per_poem_ar(std::span<const ReviewRecord> records);

/// Mean and sample standard deviation per (system, metric); throws
/// InputError on a poem_id missing from the manifest. Rows sorted by system
/// name.
std::vector<SystemStats> aggregate_stats(std::span<const ReviewRecord> records,
                                         const PoemManifest& manifest);

/// CSV mirroring the review-statistics table: one row per system with
/// mean/stddev pairs for every aspect plus the mean AR.
void write_stats_csv(std::ostream& out, std::span<const SystemStats> stats);

}  // namespace bipro

#endif  // BIPRO_REVIEW_STATS_H_
