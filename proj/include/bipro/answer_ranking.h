#ifndef BIPRO_ANSWER_RANKING_H_
#define BIPRO_ANSWER_RANKING_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bipro {

/// One human review row: four 1-5 aspect scores, a 1-10 overall score and
/// the reviewer's prediction of how others score the same poem.
struct ReviewRecord {
  std::string reviewer_id;
  std::string poem_id;
  int format_score = 0;      // 1-5
  int informativeness = 0;   // 1-5
  int relevance = 0;         // 1-5
  int aesthetics = 0;        // 1-5
  int overall = 0;           // 1-10
  int predicted_overall = 0; // 1-10

  /// Throws InputError when any score is out of range.
  void validate() const;
};

/// counts(i, j) = number of reviewers who chose overall i and predicted j
/// (both 1-based, 1..10).
class PredictionMatrix {
 public:
  /// Tallies the records of one poem; throws InputError on empty input or
  /// mixed poem ids.
  static PredictionMatrix build(std::span<const ReviewRecord> records);

  std::int64_t counts(int chosen, int predicted) const;
  void set(int chosen, int predicted, std::int64_t value);
  std::int64_t total() const;

 private:
  std::array<std::array<std::int64_t, 10>, 10> m_{};
};

/// One of the 18 allowed rankings: family A orders (n, n+1, n-1, n+2, ...)
/// and scores n+0.25; family B orders (n, n-1, n+1, n-2, ...) and scores
/// n+0.75; out-of-range values are skipped; centers n run 1..9.
struct CandidateRanking {
  enum class Family { kA, kB };

  Family family = Family::kA;
  int center = 1;
  std::array<int, 10> order{};  // permutation of 1..10, best rank first
  double score_value = 0.0;

  /// Rank position of answer `value` (0 = ranked first).
  int rank_of(int value) const;
};

/// All 18 candidates in deterministic order: centers 1..9, family A then B.
const std::array<CandidateRanking, 18>& candidate_rankings();

/// sum over pairs (i, j) with rank(i) <= rank(j) of counts(i, j)^2. The
/// diagonal always counts since rank(i) <= rank(i).
std::int64_t ranking_objective(const CandidateRanking& ranking, const PredictionMatrix& m);

/// The Answer-Ranking score of one poem: the score value of the objective's
/// argmax over the 18 candidates, ties averaged. Always within
/// [1.25, 9.75].
double ar_score(std::span<const ReviewRecord> records);

}  // namespace bipro

#endif  // BIPRO_ANSWER_RANKING_H_
