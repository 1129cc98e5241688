#include "bipro/beam_engine.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "bipro/hashing.h"
#include "bipro/utf8.h"

namespace bipro {
namespace {

double stream_u01(std::uint64_t seed, int beam, int step, std::int64_t attempt) {
  std::uint64_t h = hashing::fnv1a_u64(seed);
  h = hashing::fnv1a_u64(static_cast<std::uint64_t>(beam), h);
  h = hashing::fnv1a_u64(static_cast<std::uint64_t>(step), h);
  h = hashing::fnv1a_u64(static_cast<std::uint64_t>(attempt), h);
  return hashing::to_unit_interval(hashing::splitmix64(h));
}

// Inverse-CDF pick restricted to ids not in `excluded`; returns -1 when the
// remaining support is empty.
int pick_excluding(const TokenDistribution& dist, const std::set<int>& excluded, double u) {
  double total = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    if (dist.probs[i] > 0.0 && excluded.count(static_cast<int>(i)) == 0) total += dist.probs[i];
  }
  if (total <= 0.0) return -1;
  double threshold = u * total;
  double cum = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    if (dist.probs[i] <= 0.0 || excluded.count(static_cast<int>(i)) != 0) continue;
    last = static_cast<int>(i);
    cum += dist.probs[i];
    if (threshold < cum) return last;
  }
  return last;
}

struct BeamState {
  std::vector<std::string> tokens;
  double logprob = 0.0;
  bool alive = true;
};

Violation rule_violation(int rule, int sentence_1based) {
  Violation v;
  v.rule = rule;
  v.sentence = sentence_1based;
  v.message = "prefix cannot be completed under rule " + std::to_string(rule);
  return v;
}

}  // namespace

nlohmann::ordered_json StepEvent::to_json() const {
  nlohmann::ordered_json j;
  j["step"] = step;
  j["beam"] = beam;
  j["token"] = token;
  j["status"] = status;
  j["rule"] = rule ? nlohmann::ordered_json(*rule) : nlohmann::ordered_json(nullptr);
  return j;
}

SentenceResult generate_constrained_sentence(const ModelBackend& model,
                                             const BlockContext& context, int sentence_index,
                                             const Poem& poem_so_far,
                                             const PingshuiVerifier& verifier,
                                             const SentenceScorer& scorer,
                                             const BeamConfig& config, const StepTrace& trace) {
  if (config.beam_size < 1) throw ConfigError("beam_size must be >= 1");
  const int k = config.beam_size;
  const int length = poem_so_far.format.sentence_length;
  const std::int64_t budget_per_step = config.max_replacements_per_step < 0
                                           ? static_cast<std::int64_t>(4) * k
                                           : config.max_replacements_per_step;
  const Vocabulary& vocab = model.vocabulary();

  std::vector<BeamState> beams(static_cast<std::size_t>(k));
  std::int64_t candidates_considered = 0;
  std::int64_t replacements = 0;

  auto emit = [&](int step, int beam, const std::string& token, const char* status,
                  std::optional<int> rule) {
    if (trace) trace(StepEvent{step, beam, token, status, rule});
  };

  for (int step = 0; step < length; ++step) {
    const std::vector<BeamState> pre = beams;  // pre-step states for replacement
    std::vector<Violation> step_violations;
    // Per-parent distributions are shared by the primary extension and every
    // replacement branched off the same parent.
    std::map<int, TokenDistribution> dist_cache;
    auto dist_of = [&](int i) -> const TokenDistribution& {
      auto it = dist_cache.find(i);
      if (it == dist_cache.end()) {
        it = dist_cache
                 .emplace(i, model.next_token_distribution(
                                 context, pre[static_cast<std::size_t>(i)].tokens))
                 .first;
      }
      return it->second;
    };

    std::map<int, std::set<int>> donor_used;  // donor -> token ids taken this step
    std::vector<std::vector<std::string>> accepted_children;

    auto is_duplicate = [&](const std::vector<std::string>& tokens) {
      return std::find(accepted_children.begin(), accepted_children.end(), tokens) !=
             accepted_children.end();
    };

    // Extend every alive beam by one sampled token.
    for (int i = 0; i < k; ++i) {
      if (!beams[static_cast<std::size_t>(i)].alive) continue;
      const TokenDistribution& dist = dist_of(i);
      double u = stream_u01(config.seed, i, step, 0);
      int id = sampling::pick(dist, u);
      donor_used[i].insert(id);
      BeamState& b = beams[static_cast<std::size_t>(i)];
      b.tokens.push_back(vocab.token(id));
      b.logprob += std::log(dist.probs[static_cast<std::size_t>(id)]);

      PrefixFeasibility pf = verifier.check_prefix(poem_so_far, sentence_index, b.tokens);
      if (!pf) {
        b.alive = false;
        ++candidates_considered;
        step_violations.push_back(rule_violation(pf.rule, sentence_index + 1));
        emit(step, i, b.tokens.back(), "dead", pf.rule);
      } else if (is_duplicate(b.tokens)) {
        b.alive = false;
        ++candidates_considered;
        emit(step, i, b.tokens.back(), "dead", std::nullopt);
      } else {
        accepted_children.push_back(b.tokens);
        emit(step, i, b.tokens.back(), "active", std::nullopt);
      }
    }

    // Refill dead beams (including ones lost on earlier steps) by branching
    // off surviving donors, best first.
    std::deque<int> dead_slots;
    for (int i = 0; i < k; ++i) {
      if (!beams[static_cast<std::size_t>(i)].alive) dead_slots.push_back(i);
    }
    std::int64_t budget = budget_per_step;
    std::vector<std::int64_t> attempt(static_cast<std::size_t>(k), 1);
    while (!dead_slots.empty() && budget > 0) {
      int d = dead_slots.front();
      dead_slots.pop_front();

      // Donors own a valid pre-step state: they were alive entering the step
      // and their own extension survived. Revived slots are reachable only
      // through such a donor, so they never donate themselves.
      std::vector<int> donors;
      for (int i = 0; i < k; ++i) {
        if (beams[static_cast<std::size_t>(i)].alive && pre[static_cast<std::size_t>(i)].alive) {
          donors.push_back(i);
        }
      }
      std::stable_sort(donors.begin(), donors.end(), [&](int a, int b) {
        return pre[static_cast<std::size_t>(a)].logprob > pre[static_cast<std::size_t>(b)].logprob;
      });

      bool grafted = false;
      for (int donor : donors) {
        if (budget <= 0) break;
        const TokenDistribution& dist = dist_of(donor);
        while (budget > 0) {
          double u = stream_u01(config.seed, d, step, attempt[static_cast<std::size_t>(d)]++);
          int id = pick_excluding(dist, donor_used[donor], u);
          if (id < 0) break;  // this donor has no untried continuation left
          --budget;
          donor_used[donor].insert(id);

          BeamState candidate;
          candidate.tokens = pre[static_cast<std::size_t>(donor)].tokens;
          candidate.tokens.push_back(vocab.token(id));
          candidate.logprob = pre[static_cast<std::size_t>(donor)].logprob +
                              std::log(dist.probs[static_cast<std::size_t>(id)]);

          PrefixFeasibility pf = verifier.check_prefix(poem_so_far, sentence_index,
                                                       candidate.tokens);
          if (pf && !is_duplicate(candidate.tokens)) {
            accepted_children.push_back(candidate.tokens);
            beams[static_cast<std::size_t>(d)] = std::move(candidate);
            beams[static_cast<std::size_t>(d)].alive = true;
            ++replacements;
            emit(step, d, vocab.token(id), "replaced", std::nullopt);
            grafted = true;
            break;
          }
          ++candidates_considered;
          if (!pf) step_violations.push_back(rule_violation(pf.rule, sentence_index + 1));
          emit(step, d, vocab.token(id), "dead",
               pf.feasible ? std::optional<int>() : std::optional<int>(pf.rule));
        }
        if (grafted) break;
      }
      // A slot nobody could refill stays dead for the rest of the sentence.
    }

    bool any_alive = std::any_of(beams.begin(), beams.end(),
                                 [](const BeamState& b) { return b.alive; });
    if (!any_alive) {
      throw ExhaustionError("all beams died at step " + std::to_string(step + 1) +
                                " of sentence " + std::to_string(sentence_index + 1),
                            std::move(step_violations));
    }
  }

  // Every surviving beam holds a complete, feasibility-checked sentence.
  int best = -1;
  double best_score = 0.0;
  std::vector<double> scores(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i) {
    if (!beams[static_cast<std::size_t>(i)].alive) continue;
    ++candidates_considered;
    if (!scorer) {
      if (best < 0) best = i;  // direct mode: first completed beam
      continue;
    }
    scores[static_cast<std::size_t>(i)] = scorer(beams[static_cast<std::size_t>(i)].tokens);
    if (best < 0 || scores[static_cast<std::size_t>(i)] > best_score) {
      best = i;
      best_score = scores[static_cast<std::size_t>(i)];
    }
  }
  if (best < 0) {
    throw ExhaustionError("no beam completed sentence " + std::to_string(sentence_index + 1), {});
  }

  SentenceResult result;
  result.tokens = beams[static_cast<std::size_t>(best)].tokens;
  result.sentence = utf8::join(result.tokens);
  result.score = scorer ? best_score : 0.0;
  result.candidates_considered = candidates_considered;
  result.replacements = replacements;
  return result;
}

}  // namespace bipro
