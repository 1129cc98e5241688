#include "bipro/answer_ranking.h"

#include <algorithm>

#include "bipro/errors.h"

namespace bipro {
namespace {

void require_range(int value, int lo, int hi, const char* field) {
  if (value < lo || value > hi) {
    throw InputError(std::string(field) + " must be in [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "], got " + std::to_string(value));
  }
}

CandidateRanking build_candidate(CandidateRanking::Family family, int center) {
  CandidateRanking c;
  c.family = family;
  c.center = center;
  c.score_value = family == CandidateRanking::Family::kA ? center + 0.25 : center + 0.75;
  // Interleave outward from the center, skipping values outside 1..10.
  // Family A visits +1 before -1; family B visits -1 before +1.
  std::size_t pos = 0;
  c.order[pos++] = center;
  for (int d = 1; pos < c.order.size(); ++d) {
    int first = family == CandidateRanking::Family::kA ? center + d : center - d;
    int second = family == CandidateRanking::Family::kA ? center - d : center + d;
    for (int v : {first, second}) {
      if (v >= 1 && v <= 10 && pos < c.order.size()) c.order[pos++] = v;
    }
  }
  return c;
}

}  // namespace

void ReviewRecord::validate() const {
  if (reviewer_id.empty()) throw InputError("reviewer_id must be non-empty");
  if (poem_id.empty()) throw InputError("poem_id must be non-empty");
  require_range(format_score, 1, 5, "format");
  require_range(informativeness, 1, 5, "informativeness");
  require_range(relevance, 1, 5, "relevance");
  require_range(aesthetics, 1, 5, "aesthetics");
  require_range(overall, 1, 10, "overall");
  require_range(predicted_overall, 1, 10, "predicted");
}

PredictionMatrix PredictionMatrix::build(std::span<const ReviewRecord> records) {
  if (records.empty()) throw InputError("no review records");
  PredictionMatrix m;
  const std::string& poem_id = records.front().poem_id;
  for (const ReviewRecord& r : records) {
    if (r.poem_id != poem_id) {
      throw InputError("records mix poem ids \"" + poem_id + "\" and \"" + r.poem_id + "\"");
    }
    r.validate();
    m.m_[static_cast<std::size_t>(r.overall - 1)]
        [static_cast<std::size_t>(r.predicted_overall - 1)] += 1;
  }
  return m;
}

std::int64_t PredictionMatrix::counts(int chosen, int predicted) const {
  require_range(chosen, 1, 10, "chosen");
  require_range(predicted, 1, 10, "predicted");
  return m_[static_cast<std::size_t>(chosen - 1)][static_cast<std::size_t>(predicted - 1)];
}

void PredictionMatrix::set(int chosen, int predicted, std::int64_t value) {
  require_range(chosen, 1, 10, "chosen");
  require_range(predicted, 1, 10, "predicted");
  if (value < 0) throw InputError("counts must be non-negative");
  m_[static_cast<std::size_t>(chosen - 1)][static_cast<std::size_t>(predicted - 1)] = value;
}

std::int64_t PredictionMatrix::total() const {
  std::int64_t sum = 0;
  for (const auto& row : m_) {
    for (std::int64_t v : row) sum += v;
  }
  return sum;
}

int CandidateRanking::rank_of(int value) const {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == value) return static_cast<int>(i);
  }
  throw InputError("value " + std::to_string(value) + " not in ranking");
}

const std::array<CandidateRanking, 18>& candidate_rankings() {
  static const std::array<CandidateRanking, 18> kAll = [] {
    std::array<CandidateRanking, 18> all{};
    std::size_t idx = 0;
    for (int n = 1; n <= 9; ++n) {
      all[idx++] = build_candidate(CandidateRanking::Family::kA, n);
      all[idx++] = build_candidate(CandidateRanking::Family::kB, n);
    }
    return all;
  }();
  return kAll;
}

std::int64_t ranking_objective(const CandidateRanking& ranking, const PredictionMatrix& m) {
  std::array<int, 11> rank{};  // rank[value], values 1..10
  for (int v = 1; v <= 10; ++v) rank[static_cast<std::size_t>(v)] = ranking.rank_of(v);
  std::int64_t sum = 0;
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      if (rank[static_cast<std::size_t>(i)] <= rank[static_cast<std::size_t>(j)]) {
        std::int64_t c = m.counts(i, j);
        sum += c * c;
      }
    }
  }
  return sum;
}

double ar_score(std::span<const ReviewRecord> records) {
  PredictionMatrix m = PredictionMatrix::build(records);
  const auto& candidates = candidate_rankings();
  std::int64_t best = -1;
  double score_sum = 0.0;
  int ties = 0;
  for (const CandidateRanking& c : candidates) {
    std::int64_t objective = ranking_objective(c, m);
    if (objective > best) {
      best = objective;
      score_sum = c.score_value;
      ties = 1;
    } else if (objective == best) {
      score_sum += c.score_value;
      ++ties;
    }
  }
  return score_sum / ties;
}

}  // namespace bipro
