#ifndef BIPRO_VERIFIER_H_
#define BIPRO_VERIFIER_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bipro/poem.h"
#include "bipro/rhyme_dictionary.h"

namespace bipro {

/// Diagnosis of one broken rule. `sentence` and `position` are 1-based where
/// they apply.
struct Violation {
  int rule = 0;  // 1..8
  std::optional<int> sentence;
  std::optional<int> position;
  std::string message;

  nlohmann::ordered_json to_json() const;
};

struct VerifyOptions {
  /// false: one globally consistent pronunciation per character occurrence
  /// (backtracking search). true: each rule may pick pronunciations
  /// independently, the paper's literal reading.
  bool lenient = false;

  /// Whether a Ping-ending first sentence must also use a character distinct
  /// from the even-sentence rhyme characters.
  bool first_sentence_distinct = true;
};

/// One chosen pronunciation per character occurrence:
/// assignment[sentence][character].
using Assignment = std::vector<std::vector<Pronunciation>>;

/// Pure predicate for a single rule under an explicit assignment. Returns
/// the first offending position, or nullopt when the rule passes. `rule`
/// must be in [1, 8].
std::optional<Violation> check_rule(int rule, const Poem& poem,
                                    const Assignment& assignment,
                                    const VerifyOptions& opts = {});

struct PrefixFeasibility {
  bool feasible = true;
  int rule = 0;  // the rule that rules every completion out; 0 when feasible

  explicit operator bool() const { return feasible; }
};

/// Rule engine over a loaded dictionary. All methods are pure and safe to
/// call concurrently.
class PingshuiVerifier {
 public:
  explicit PingshuiVerifier(RhymeDictionary dict, VerifyOptions opts = {});

  /// Full-poem verification. Empty result means the poem satisfies all eight
  /// rules (under one consistent assignment by default, per-rule choice with
  /// options().lenient). Throws VocabularyError on characters missing from
  /// the dictionary.
  std::vector<Violation> verify(const Poem& poem) const;

  /// Feasibility of a partial sentence for beam pruning. `sentence_index` is
  /// 0-based; the poem's current content of that slot, if any, is ignored.
  /// Infeasible is sound (no completion can satisfy the rules); Feasible may
  /// be optimistic. Once the prefix reaches full sentence length the check
  /// is exact over everything generated so far.
  PrefixFeasibility check_prefix(const Poem& poem_so_far, int sentence_index,
                                 std::span<const std::string> prefix) const;

  const RhymeDictionary& dictionary() const { return dict_; }
  const VerifyOptions& options() const { return opts_; }

 private:
  std::vector<Violation> verify_impl(const Poem& poem, bool require_complete) const;

  RhymeDictionary dict_;
  VerifyOptions opts_;
};

}  // namespace bipro

#endif  // BIPRO_VERIFIER_H_
