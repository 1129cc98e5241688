#include "bipro/verifier.h"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "bipro/errors.h"
#include "bipro/utf8.h"

namespace bipro {
namespace {

constexpr int kToneCount = 2;

int tone_bit(Tone t) { return t == Tone::kPing ? 1 : 2; }

struct CharOccur {
  std::string ch;
  std::span<const Pronunciation> prons;

  int tone_mask() const {
    int m = 0;
    for (const auto& p : prons) m |= tone_bit(p.tone);
    return m;
  }
  bool has(Tone t) const { return (tone_mask() & tone_bit(t)) != 0; }
  bool only(Tone t) const { return tone_mask() == tone_bit(t); }

  std::vector<int> classes_with(Tone t) const {
    std::vector<int> out;
    for (const auto& p : prons) {
      if (p.tone == t) out.push_back(p.rhyme_id);
    }
    return out;
  }
  std::set<int> all_classes() const {
    std::set<int> out;
    for (const auto& p : prons) out.insert(p.rhyme_id);
    return out;
  }
};

using SentenceChars = std::vector<CharOccur>;

// One slot per sentence position; nullopt = the slot is not generated yet
// (or is being regenerated).
using Slots = std::vector<std::optional<SentenceChars>>;

Violation make_violation(int rule, std::optional<int> sentence, std::optional<int> position,
                         std::string message) {
  Violation v;
  v.rule = rule;
  v.sentence = sentence;
  v.position = position;
  v.message = std::move(message);
  return v;
}

SentenceChars resolve_sentence(const std::string& text, int sentence_1based,
                               const RhymeDictionary& dict) {
  SentenceChars chars;
  auto split = utf8::split(text);
  chars.reserve(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (!dict.contains(split[i])) {
      throw VocabularyError("unknown character \"" + split[i] + "\" at sentence " +
                            std::to_string(sentence_1based) + ", position " +
                            std::to_string(i + 1));
    }
    chars.push_back(CharOccur{split[i], dict.lookup(split[i])});
  }
  return chars;
}

// ---------------------------------------------------------------------------
// Tone-vector machinery. Rules 3, 5, 7, 8 depend only on tones inside one
// sentence; rule 4 additionally needs the rhyme class of the final
// character; rule 6 couples the 2nd-character tones of adjacent sentences.
// A per-sentence "profile" is everything the cross-sentence rules need.
// ---------------------------------------------------------------------------

Tone required_end_tone(int sentence_1based) {
  return sentence_1based % 2 == 1 ? Tone::kZe : Tone::kPing;
}

bool tone_vector_ok(const std::vector<Tone>& v, int sentence_1based) {
  const int len = static_cast<int>(v.size());
  // Rule 3: odd sentences end Ze, even end Ping; the first sentence is free.
  if (sentence_1based >= 2 && v[len - 1] != required_end_tone(sentence_1based)) return false;
  // Rule 5: 2nd vs 4th character, and 6th matches 2nd in 7-character lines.
  if (len >= 4 && v[1] == v[3]) return false;
  if (len == 7 && v[5] != v[1]) return false;
  // Rule 7: last three characters must not share one tone.
  if (len >= 3 && v[len - 3] == v[len - 2] && v[len - 2] == v[len - 1]) return false;
  // Rule 8: in a Ping-ending sentence, no non-final Ping character may sit
  // between two Ze characters. Boundary characters lack two neighbors.
  if (v[len - 1] == Tone::kPing) {
    for (int p = 1; p + 1 < len; ++p) {
      if (p == len - 1) break;
      if (v[p] == Tone::kPing && v[p - 1] == Tone::kZe && v[p + 1] == Tone::kZe) return false;
    }
  }
  return true;
}

struct Profile {
  Tone t2;
  Tone end_tone;
  int end_class;

  auto operator<=>(const Profile&) const = default;
};

// Enumerates the per-occurrence tone vectors of one sentence (at most 2^7)
// and keeps the profiles of those satisfying the intra-sentence rules.
std::set<Profile> sentence_profiles(const SentenceChars& chars, int sentence_1based) {
  const int len = static_cast<int>(chars.size());
  std::set<Profile> profiles;
  std::vector<std::vector<Tone>> options(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) {
    if (chars[i].has(Tone::kPing)) options[i].push_back(Tone::kPing);
    if (chars[i].has(Tone::kZe)) options[i].push_back(Tone::kZe);
  }
  std::vector<Tone> v(static_cast<std::size_t>(len), Tone::kPing);
  std::vector<std::size_t> idx(static_cast<std::size_t>(len), 0);
  while (true) {
    for (int i = 0; i < len; ++i) v[i] = options[i][idx[i]];
    if (tone_vector_ok(v, sentence_1based)) {
      for (int cls : chars[len - 1].classes_with(v[len - 1])) {
        profiles.insert(Profile{v[1], v[len - 1], cls});
      }
    }
    int pos = len - 1;
    while (pos >= 0 && ++idx[pos] == options[pos].size()) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return profiles;
}

// Rule 6 relation between sentence i (1-based) and sentence i-1: even
// sentences differ, odd sentences (except the first) match.
bool rule6_ok(int sentence_1based, Tone cur_t2, Tone prev_t2) {
  if (sentence_1based % 2 == 0) return cur_t2 != prev_t2;
  return cur_t2 == prev_t2;
}

// Cross-sentence search: is there one globally consistent assignment whose
// profiles satisfy rules 4 and 6? State = (t2 of the previous present
// sentence, rhyme class committed so far).
bool joint_assignment_exists(const Slots& slots, const VerifyOptions& opts) {
  // Text-level rule 4 prechecks.
  std::set<std::string> even_end_chars;
  for (std::size_t i = 1; i < slots.size(); i += 2) {  // 1-based even = 0-based odd
    if (!slots[i] || slots[i]->empty()) continue;
    if (!even_end_chars.insert(slots[i]->back().ch).second) return false;
  }
  bool s1_ping_blocked = false;
  if (opts.first_sentence_distinct && !slots.empty() && slots[0] && !slots[0]->empty()) {
    s1_ping_blocked = even_end_chars.count(slots[0]->back().ch) != 0;
  }

  // encoded state: prev_t2 in {-1 none, 0 Ping, 1 Ze}, class 0 = uncommitted
  std::set<std::pair<int, int>> states = {{-1, 0}};
  for (std::size_t slot = 0; slot < slots.size(); ++slot) {
    const int i = static_cast<int>(slot) + 1;
    if (!slots[slot] || slots[slot]->empty()) {
      std::set<std::pair<int, int>> next;
      for (const auto& [_, cls] : states) next.insert({-1, cls});
      states = std::move(next);
      continue;
    }
    std::set<Profile> profiles = sentence_profiles(*slots[slot], i);
    std::set<std::pair<int, int>> next;
    for (const auto& [prev_t2, cls] : states) {
      for (const Profile& prof : profiles) {
        if (prev_t2 >= 0 && i >= 2 &&
            !rule6_ok(i, prof.t2, prev_t2 == 0 ? Tone::kPing : Tone::kZe)) {
          continue;
        }
        bool member = (i % 2 == 0) || (i == 1 && prof.end_tone == Tone::kPing);
        if (i == 1 && prof.end_tone == Tone::kPing && s1_ping_blocked) continue;
        int new_cls = cls;
        if (member) {
          if (cls != 0 && cls != prof.end_class) continue;
          new_cls = prof.end_class;
        }
        next.insert({prof.t2 == Tone::kPing ? 0 : 1, new_cls});
      }
    }
    states = std::move(next);
    if (states.empty()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Per-rule satisfiability with within-rule-consistent but across-rule-free
// pronunciation choices (the --lenient semantics; also sound pruning for the
// strict mode, since anything a single rule cannot satisfy alone cannot be
// satisfied jointly).
// ---------------------------------------------------------------------------

std::optional<Violation> lenient_rule3(const Slots& slots) {
  for (std::size_t slot = 1; slot < slots.size(); ++slot) {
    const int i = static_cast<int>(slot) + 1;
    if (!slots[slot] || slots[slot]->empty()) continue;
    Tone required = required_end_tone(i);
    if (!slots[slot]->back().has(required)) {
      return make_violation(3, i, static_cast<int>(slots[slot]->size()),
                            "sentence " + std::to_string(i) + " must end with a " +
                                tone_name(required) + " character");
    }
  }
  return std::nullopt;
}

std::optional<Violation> lenient_rule4(const Slots& slots, const VerifyOptions& opts) {
  std::vector<std::pair<int, const CharOccur*>> members;  // even sentences
  std::set<std::string> seen;
  for (std::size_t slot = 1; slot < slots.size(); slot += 2) {
    if (!slots[slot] || slots[slot]->empty()) continue;
    const int i = static_cast<int>(slot) + 1;
    const CharOccur& end = slots[slot]->back();
    if (!seen.insert(end.ch).second) {
      return make_violation(4, i, static_cast<int>(slots[slot]->size()),
                            "rhyme character \"" + end.ch + "\" repeats an earlier one");
    }
    members.push_back({i, &end});
  }
  std::set<int> common;
  bool common_init = false;
  for (const auto& [i, end] : members) {
    std::set<int> classes = end->all_classes();
    if (!common_init) {
      common = std::move(classes);
      common_init = true;
    } else {
      std::set<int> merged;
      std::set_intersection(common.begin(), common.end(), classes.begin(), classes.end(),
                            std::inserter(merged, merged.begin()));
      common = std::move(merged);
    }
    if (common.empty()) {
      return make_violation(4, i, static_cast<int>(slots[static_cast<std::size_t>(i) - 1]->size()),
                            "no rhyme class is shared by all rhyme-position characters");
    }
  }
  // A Ping-only first-sentence ending is forced into the rhyme group.
  if (!slots.empty() && slots[0] && !slots[0]->empty()) {
    const CharOccur& end = slots[0]->back();
    if (end.only(Tone::kPing)) {
      if (opts.first_sentence_distinct && seen.count(end.ch) != 0) {
        return make_violation(4, 1, static_cast<int>(slots[0]->size()),
                              "first-sentence rhyme character \"" + end.ch +
                                  "\" repeats an even-sentence ending");
      }
      if (common_init) {
        std::vector<int> classes = end.classes_with(Tone::kPing);
        bool any = std::any_of(classes.begin(), classes.end(),
                               [&](int c) { return common.count(c) != 0; });
        if (!any) {
          return make_violation(4, 1, static_cast<int>(slots[0]->size()),
                                "first sentence ends Ping but shares no rhyme class with "
                                "the even sentences");
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> lenient_rule5(const Slots& slots, int format_length) {
  for (std::size_t slot = 0; slot < slots.size(); ++slot) {
    if (!slots[slot]) continue;
    const SentenceChars& s = *slots[slot];
    const int i = static_cast<int>(slot) + 1;
    if (s.size() < 4) continue;
    bool ok = false;
    for (Tone t2 : {Tone::kPing, Tone::kZe}) {
      if (!s[1].has(t2)) continue;
      for (Tone t4 : {Tone::kPing, Tone::kZe}) {
        if (!s[3].has(t4) || t2 == t4) continue;
        if (format_length == 7 && s.size() >= 6 && !s[5].has(t2)) continue;
        ok = true;
      }
    }
    if (!ok) {
      return make_violation(5, i, 4,
                            "characters 2 and 4 of sentence " + std::to_string(i) +
                                " cannot take different tones" +
                                (format_length == 7 ? " with character 6 matching character 2"
                                                    : ""));
    }
  }
  return std::nullopt;
}

std::optional<Violation> lenient_rule6(const Slots& slots) {
  int prev_mask = 0;  // reachable tones of the previous sentence's 2nd char
  for (std::size_t slot = 0; slot < slots.size(); ++slot) {
    const int i = static_cast<int>(slot) + 1;
    if (!slots[slot] || slots[slot]->size() < 2) {
      prev_mask = 0;
      continue;
    }
    int mask = (*slots[slot])[1].tone_mask();
    if (i >= 2 && prev_mask != 0) {
      int reachable = 0;
      for (Tone cur : {Tone::kPing, Tone::kZe}) {
        if ((mask & tone_bit(cur)) == 0) continue;
        for (Tone prev : {Tone::kPing, Tone::kZe}) {
          if ((prev_mask & tone_bit(prev)) == 0) continue;
          if (rule6_ok(i, cur, prev)) reachable |= tone_bit(cur);
        }
      }
      if (reachable == 0) {
        return make_violation(6, i, 2,
                              "2nd character of sentence " + std::to_string(i) +
                                  (i % 2 == 0 ? " cannot differ in tone from"
                                              : " cannot match the tone of") +
                                  " sentence " + std::to_string(i - 1));
      }
      mask = reachable;
    }
    prev_mask = mask;
  }
  return std::nullopt;
}

std::optional<Violation> lenient_rule7(const Slots& slots) {
  for (std::size_t slot = 0; slot < slots.size(); ++slot) {
    if (!slots[slot] || slots[slot]->size() < 3) continue;
    const SentenceChars& s = *slots[slot];
    const int i = static_cast<int>(slot) + 1;
    const std::size_t len = s.size();
    int m1 = s[len - 3].tone_mask(), m2 = s[len - 2].tone_mask(), m3 = s[len - 1].tone_mask();
    bool forced_same = false;
    for (Tone t : {Tone::kPing, Tone::kZe}) {
      int bit = tone_bit(t);
      if (m1 == bit && m2 == bit && m3 == bit) forced_same = true;
    }
    if (forced_same) {
      return make_violation(7, i, static_cast<int>(len),
                            "last three characters of sentence " + std::to_string(i) +
                                " all share the " + tone_name(s[len - 1].prons[0].tone) +
                                " tone");
    }
  }
  return std::nullopt;
}

std::optional<Violation> lenient_rule8(const Slots& slots) {
  for (std::size_t slot = 0; slot < slots.size(); ++slot) {
    if (!slots[slot] || slots[slot]->size() < 3) continue;
    const SentenceChars& s = *slots[slot];
    const int i = static_cast<int>(slot) + 1;
    const int len = static_cast<int>(s.size());
    if (s.back().has(Tone::kZe)) continue;  // a Ze reading sidesteps the rule
    // End forced Ping: look for an interior tone choice with no isolated Ping.
    std::vector<std::vector<Tone>> options(static_cast<std::size_t>(len));
    for (int p = 0; p < len; ++p) {
      if (s[p].has(Tone::kPing)) options[p].push_back(Tone::kPing);
      if (s[p].has(Tone::kZe)) options[p].push_back(Tone::kZe);
    }
    options[len - 1] = {Tone::kPing};
    std::vector<std::size_t> idx(static_cast<std::size_t>(len), 0);
    std::vector<Tone> v(static_cast<std::size_t>(len), Tone::kPing);
    bool ok = false;
    while (!ok) {
      for (int p = 0; p < len; ++p) v[p] = options[p][idx[p]];
      bool trigger = false;
      for (int p = 1; p + 1 < len && !trigger; ++p) {
        if (p != len - 1 && v[p] == Tone::kPing && v[p - 1] == Tone::kZe &&
            v[p + 1] == Tone::kZe) {
          trigger = true;
        }
      }
      if (!trigger) {
        ok = true;
        break;
      }
      int pos = len - 1;
      while (pos >= 0 && ++idx[pos] == options[pos].size()) idx[pos--] = 0;
      if (pos < 0) break;
    }
    if (!ok) {
      int where = 0;
      for (int p = 1; p + 1 < len; ++p) {
        if (s[p].only(Tone::kPing) && s[p - 1].only(Tone::kZe) && s[p + 1].only(Tone::kZe)) {
          where = p + 1;
          break;
        }
      }
      return make_violation(8, i, where > 0 ? std::optional<int>(where) : std::nullopt,
                            "sentence " + std::to_string(i) +
                                " ends Ping but an interior Ping character is "
                                "surrounded by Ze characters");
    }
  }
  return std::nullopt;
}

std::vector<Violation> lenient_violations(const Slots& slots, int format_length,
                                          const VerifyOptions& opts) {
  std::vector<Violation> out;
  if (auto v = lenient_rule3(slots)) out.push_back(*v);
  if (auto v = lenient_rule4(slots, opts)) out.push_back(*v);
  if (auto v = lenient_rule5(slots, format_length)) out.push_back(*v);
  if (auto v = lenient_rule6(slots)) out.push_back(*v);
  if (auto v = lenient_rule7(slots)) out.push_back(*v);
  if (auto v = lenient_rule8(slots)) out.push_back(*v);
  return out;
}

// ---------------------------------------------------------------------------
// Best-assignment diagnostics for the rare strict-mode case where every rule
// is individually satisfiable but no single assignment covers them all.
// Bounded enumeration; exact for small dictionaries.
// ---------------------------------------------------------------------------

constexpr std::size_t kDiagnosisCap = 200000;

std::vector<Violation> best_assignment_violations(const Poem& poem, const Slots& slots,
                                                  const VerifyOptions& opts) {
  struct Occurrence {
    std::size_t sentence;
    std::size_t pos;
  };
  std::vector<Occurrence> occurrences;
  Assignment assignment(slots.size());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (!slots[s]) continue;
    assignment[s].resize(slots[s]->size(), Pronunciation{Tone::kPing, 1});
    for (std::size_t p = 0; p < slots[s]->size(); ++p) occurrences.push_back({s, p});
  }

  auto violations_for = [&]() {
    std::vector<Violation> vs;
    for (int rule = 3; rule <= 8; ++rule) {
      if (auto v = check_rule(rule, poem, assignment, opts)) vs.push_back(*v);
    }
    return vs;
  };

  std::vector<std::size_t> idx(occurrences.size(), 0);
  std::vector<Violation> best;
  bool have_best = false;
  std::size_t explored = 0;
  while (explored < kDiagnosisCap) {
    ++explored;
    for (std::size_t k = 0; k < occurrences.size(); ++k) {
      const auto& [s, p] = occurrences[k];
      assignment[s][p] = (*slots[s])[p].prons[idx[k]];
    }
    std::vector<Violation> vs = violations_for();
    if (!have_best || vs.size() < best.size()) {
      best = std::move(vs);
      have_best = true;
      if (best.size() <= 1) break;  // cannot do better: the joint search failed
    }
    int pos = static_cast<int>(occurrences.size()) - 1;
    while (pos >= 0) {
      const auto& [s, p] = occurrences[static_cast<std::size_t>(pos)];
      if (++idx[static_cast<std::size_t>(pos)] < (*slots[s])[p].prons.size()) break;
      idx[static_cast<std::size_t>(pos)--] = 0;
    }
    if (pos < 0) break;
  }
  return best;
}

void sort_violations(std::vector<Violation>& vs) {
  std::sort(vs.begin(), vs.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.rule, a.sentence, a.position) < std::tie(b.rule, b.sentence, b.position);
  });
}

}  // namespace

nlohmann::ordered_json Violation::to_json() const {
  nlohmann::ordered_json j;
  j["rule"] = rule;
  j["sentence"] = sentence ? nlohmann::ordered_json(*sentence) : nlohmann::ordered_json(nullptr);
  j["position"] = position ? nlohmann::ordered_json(*position) : nlohmann::ordered_json(nullptr);
  j["message"] = message;
  return j;
}

std::optional<Violation> check_rule(int rule, const Poem& poem, const Assignment& assignment,
                                    const VerifyOptions& opts) {
  if (rule < 1 || rule > 8) throw InputError("rule must be in [1, 8]");

  const int n = static_cast<int>(poem.sentences.size());
  auto tones = [&](int s /*0-based*/) -> const std::vector<Pronunciation>& {
    return assignment.at(static_cast<std::size_t>(s));
  };
  auto sentence_len = [&](int s) {
    return static_cast<int>(assignment.at(static_cast<std::size_t>(s)).size());
  };

  switch (rule) {
    case 1: {
      if (n != poem.format.sentence_count) {
        return make_violation(1, std::nullopt, std::nullopt,
                              "poem has " + std::to_string(n) + " sentences; a " +
                                  poem.format.name() + " must have " +
                                  std::to_string(poem.format.sentence_count));
      }
      return std::nullopt;
    }
    case 2: {
      for (int s = 0; s < n; ++s) {
        int len = static_cast<int>(utf8::length(poem.sentences[static_cast<std::size_t>(s)]));
        if (len != poem.format.sentence_length) {
          return make_violation(2, s + 1, std::nullopt,
                                "sentence " + std::to_string(s + 1) + " has " +
                                    std::to_string(len) + " characters; expected " +
                                    std::to_string(poem.format.sentence_length));
        }
      }
      return std::nullopt;
    }
    case 3: {
      for (int s = 1; s < n; ++s) {
        int len = sentence_len(s);
        if (len == 0) continue;
        Tone required = required_end_tone(s + 1);
        if (tones(s)[static_cast<std::size_t>(len - 1)].tone != required) {
          return make_violation(3, s + 1, len,
                                "sentence " + std::to_string(s + 1) + " must end with a " +
                                    tone_name(required) + " character");
        }
      }
      return std::nullopt;
    }
    case 4: {
      std::vector<int> members;  // 0-based sentence indices in the rhyme group
      for (int s = 1; s < n; s += 2) {
        if (sentence_len(s) > 0) members.push_back(s);
      }
      bool s1_member = false;
      if (n > 0 && sentence_len(0) > 0 &&
          tones(0).back().tone == Tone::kPing) {
        s1_member = true;
      }
      std::set<std::string> seen;
      std::optional<int> cls;
      auto end_char = [&](int s) {
        auto chars = utf8::split(poem.sentences[static_cast<std::size_t>(s)]);
        return chars.empty() ? std::string() : chars.back();
      };
      for (int s : members) {
        int len = sentence_len(s);
        const std::string ch = end_char(s);
        if (!seen.insert(ch).second) {
          return make_violation(4, s + 1, len,
                                "rhyme character \"" + ch + "\" repeats an earlier one");
        }
        int c = tones(s)[static_cast<std::size_t>(len - 1)].rhyme_id;
        if (cls && *cls != c) {
          return make_violation(4, s + 1, len,
                                "sentence " + std::to_string(s + 1) + " rhymes in class " +
                                    std::to_string(c) + " but the poem rhymes in class " +
                                    std::to_string(*cls));
        }
        cls = c;
      }
      if (s1_member) {
        int len = sentence_len(0);
        const std::string ch = end_char(0);
        if (opts.first_sentence_distinct && seen.count(ch) != 0) {
          return make_violation(4, 1, len,
                                "first-sentence rhyme character \"" + ch +
                                    "\" repeats an even-sentence ending");
        }
        int c = tones(0)[static_cast<std::size_t>(len - 1)].rhyme_id;
        if (cls && *cls != c) {
          return make_violation(4, 1, len,
                                "first sentence ends Ping in class " + std::to_string(c) +
                                    " but the poem rhymes in class " + std::to_string(*cls));
        }
      }
      return std::nullopt;
    }
    case 5: {
      for (int s = 0; s < n; ++s) {
        int len = sentence_len(s);
        if (len < 4) continue;
        Tone t2 = tones(s)[1].tone;
        Tone t4 = tones(s)[3].tone;
        if (t2 == t4) {
          return make_violation(5, s + 1, 4,
                                "characters 2 and 4 of sentence " + std::to_string(s + 1) +
                                    " share the " + tone_name(t2) + " tone");
        }
        if (len == 7 && tones(s)[5].tone != t2) {
          return make_violation(5, s + 1, 6,
                                "character 6 of sentence " + std::to_string(s + 1) +
                                    " must share the tone of character 2");
        }
      }
      return std::nullopt;
    }
    case 6: {
      for (int s = 1; s < n; ++s) {
        if (sentence_len(s) < 2 || sentence_len(s - 1) < 2) continue;
        Tone cur = tones(s)[1].tone;
        Tone prev = tones(s - 1)[1].tone;
        if (!rule6_ok(s + 1, cur, prev)) {
          return make_violation(6, s + 1, 2,
                                "2nd character of sentence " + std::to_string(s + 1) +
                                    ((s + 1) % 2 == 0 ? " must differ in tone from"
                                                      : " must share the tone of") +
                                    " sentence " + std::to_string(s));
        }
      }
      return std::nullopt;
    }
    case 7: {
      for (int s = 0; s < n; ++s) {
        int len = sentence_len(s);
        if (len < 3) continue;
        Tone a = tones(s)[static_cast<std::size_t>(len - 3)].tone;
        Tone b = tones(s)[static_cast<std::size_t>(len - 2)].tone;
        Tone c = tones(s)[static_cast<std::size_t>(len - 1)].tone;
        if (a == b && b == c) {
          return make_violation(7, s + 1, len,
                                "last three characters of sentence " + std::to_string(s + 1) +
                                    " all share the " + tone_name(a) + " tone");
        }
      }
      return std::nullopt;
    }
    case 8: {
      for (int s = 0; s < n; ++s) {
        int len = sentence_len(s);
        if (len < 3) continue;
        if (tones(s)[static_cast<std::size_t>(len - 1)].tone != Tone::kPing) continue;
        for (int p = 1; p + 1 < len; ++p) {
          if (p == len - 1) break;
          if (tones(s)[static_cast<std::size_t>(p)].tone == Tone::kPing &&
              tones(s)[static_cast<std::size_t>(p - 1)].tone == Tone::kZe &&
              tones(s)[static_cast<std::size_t>(p + 1)].tone == Tone::kZe) {
            return make_violation(8, s + 1, p + 1,
                                  "Ping character at position " + std::to_string(p + 1) +
                                      " of sentence " + std::to_string(s + 1) +
                                      " is surrounded by Ze characters");
          }
        }
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

PingshuiVerifier::PingshuiVerifier(RhymeDictionary dict, VerifyOptions opts)
    : dict_(std::move(dict)), opts_(opts) {}

std::vector<Violation> PingshuiVerifier::verify(const Poem& poem) const {
  return verify_impl(poem, /*require_complete=*/true);
}

std::vector<Violation> PingshuiVerifier::verify_impl(const Poem& poem,
                                                     bool require_complete) const {
  std::vector<Violation> violations;

  Slots slots(poem.sentences.size());
  int present = 0;
  for (std::size_t s = 0; s < poem.sentences.size(); ++s) {
    if (poem.sentences[s].empty() && !require_complete) continue;  // absent slot
    slots[s] = resolve_sentence(poem.sentences[s], static_cast<int>(s) + 1, dict_);
    ++present;
  }

  // Rule 1 only once the poem claims to be complete.
  bool structural_ok = true;
  if (require_complete &&
      static_cast<int>(poem.sentences.size()) != poem.format.sentence_count) {
    violations.push_back(make_violation(
        1, std::nullopt, std::nullopt,
        "poem has " + std::to_string(poem.sentences.size()) + " sentences; a " +
            poem.format.name() + " must have " +
            std::to_string(poem.format.sentence_count)));
    structural_ok = false;
  }
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (!slots[s]) continue;
    int len = static_cast<int>(slots[s]->size());
    if (len != poem.format.sentence_length) {
      violations.push_back(make_violation(
          2, static_cast<int>(s) + 1, std::nullopt,
          "sentence " + std::to_string(s + 1) + " has " + std::to_string(len) +
              " characters; expected " + std::to_string(poem.format.sentence_length)));
      structural_ok = false;
    }
  }

  if (opts_.lenient || !structural_ok) {
    auto vs = lenient_violations(slots, poem.format.sentence_length, opts_);
    violations.insert(violations.end(), vs.begin(), vs.end());
  } else if (!joint_assignment_exists(slots, opts_)) {
    auto vs = lenient_violations(slots, poem.format.sentence_length, opts_);
    if (vs.empty()) {
      // Every rule passes on its own; the conflict only shows up jointly.
      vs = best_assignment_violations(poem, slots, opts_);
    }
    violations.insert(violations.end(), vs.begin(), vs.end());
  }

  sort_violations(violations);
  return violations;
}

PrefixFeasibility PingshuiVerifier::check_prefix(const Poem& poem_so_far, int sentence_index,
                                                 std::span<const std::string> prefix) const {
  const int length = poem_so_far.format.sentence_length;
  if (static_cast<int>(prefix.size()) > length) {
    throw InputError("prefix longer than the sentence length");
  }

  SentenceChars chars;
  chars.reserve(prefix.size());
  for (std::size_t p = 0; p < prefix.size(); ++p) {
    if (!dict_.contains(prefix[p])) {
      throw VocabularyError("unknown character \"" + prefix[p] + "\" at sentence " +
                            std::to_string(sentence_index + 1) + ", position " +
                            std::to_string(p + 1));
    }
    chars.push_back(CharOccur{prefix[p], dict_.lookup(prefix[p])});
  }

  const int cur = sentence_index + 1;  // 1-based

  // Rule 5 fires as soon as positions 2 and 4 (and 6) are pinned.
  if (chars.size() >= 4) {
    bool ok = false;
    for (Tone t2 : {Tone::kPing, Tone::kZe}) {
      if (!chars[1].has(t2)) continue;
      for (Tone t4 : {Tone::kPing, Tone::kZe}) {
        if (!chars[3].has(t4) || t2 == t4) continue;
        if (length == 7 && chars.size() >= 6 && !chars[5].has(t2)) continue;
        ok = true;
      }
    }
    if (!ok) return {false, 5};
  }

  // Rule 6 fires once the 2nd character is pinned, in both directions.
  if (chars.size() >= 2) {
    auto neighbor_mask = [&](int slot) -> int {
      if (slot < 0 || slot >= static_cast<int>(poem_so_far.sentences.size())) return 0;
      if (slot == sentence_index) return 0;
      const std::string& text = poem_so_far.sentences[static_cast<std::size_t>(slot)];
      if (text.empty()) return 0;
      auto split = utf8::split(text);
      if (split.size() < 2 || !dict_.contains(split[1])) return 0;
      return CharOccur{split[1], dict_.lookup(split[1])}.tone_mask();
    };
    int cur_mask = chars[1].tone_mask();
    auto relation_possible = [&](int even_odd_index, int a_mask, int b_mask) {
      for (Tone a : {Tone::kPing, Tone::kZe}) {
        if ((a_mask & tone_bit(a)) == 0) continue;
        for (Tone b : {Tone::kPing, Tone::kZe}) {
          if ((b_mask & tone_bit(b)) == 0) continue;
          if (rule6_ok(even_odd_index, b, a)) return true;
        }
      }
      return false;
    };
    if (cur >= 2) {
      int prev_mask = neighbor_mask(sentence_index - 1);
      if (prev_mask != 0 && !relation_possible(cur, prev_mask, cur_mask)) return {false, 6};
    }
    int next_mask = neighbor_mask(sentence_index + 1);
    if (next_mask != 0 && !relation_possible(cur + 1, cur_mask, next_mask)) return {false, 6};
  }

  // A complete sentence gets the exact check over everything present.
  if (static_cast<int>(prefix.size()) == length) {
    Poem candidate = poem_so_far;
    if (static_cast<int>(candidate.sentences.size()) <= sentence_index) {
      candidate.sentences.resize(static_cast<std::size_t>(sentence_index) + 1);
    }
    candidate.sentences[static_cast<std::size_t>(sentence_index)] =
        utf8::join(std::span<const std::string>(prefix.data(), prefix.size()));
    std::vector<Violation> vs = verify_impl(candidate, /*require_complete=*/false);
    if (!vs.empty()) {
      for (const Violation& v : vs) {
        if (v.sentence && *v.sentence == cur) return {false, v.rule};
      }
      return {false, vs.front().rule};
    }
  }

  return {true, 0};
}

}  // namespace bipro
