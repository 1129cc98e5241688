// Shared fixtures and independent oracles for the test suites.
//
// The synthetic dictionaries here are small enough that every pronunciation
// assignment can be enumerated outright, which is what the oracle functions
// do: they re-implement nothing from the verifier, they brute-force the
// definitions.

#ifndef BIPRO_TESTS_TEST_SUPPORT_H_
#define BIPRO_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bipro/poem.h"
#include "bipro/prompt_templates.h"
#include "bipro/rhyme_dictionary.h"
#include "bipro/verifier.h"

namespace bipro::testing {

// ---------------------------------------------------------------------------
// Fixture dictionary A: single-pronunciation characters plus one dual-tone
// character, built for the per-rule mutation fixture.
//
//   Ping: A B (class 1), C D (class 2), E (class 3)
//   Ze:   U V W (class 60), X (class 61)
//   Dual: G = Ping class 3 | Ze class 60
// ---------------------------------------------------------------------------
inline RhymeDictionary fixture_dictionary() {
  RhymeDictionary dict;
  dict.add("A", {Tone::kPing, 1});
  dict.add("B", {Tone::kPing, 1});
  dict.add("C", {Tone::kPing, 2});
  dict.add("D", {Tone::kPing, 2});
  dict.add("E", {Tone::kPing, 3});
  dict.add("U", {Tone::kZe, 60});
  dict.add("V", {Tone::kZe, 60});
  dict.add("W", {Tone::kZe, 60});
  dict.add("X", {Tone::kZe, 61});
  dict.add("G", {Tone::kPing, 3});
  dict.add("G", {Tone::kZe, 60});
  return dict;
}

// A 5-Jueju satisfying all eight rules over fixture_dictionary() (verified
// against the enumeration oracle in pingshui_test):
//   s1 UABVX  tones Z P P Z Z    s2 CUVDA  tones P Z Z P P
//   s3 XVCGW  tones Z Z P ? Z    s4 ECUVB  tones P P Z Z P
// Rhyme group: A (s2) and B (s4), both class 1; s1 ends Ze (class 61).
inline Poem fixture_poem() {
  Poem poem;
  poem.title = "AB";
  poem.format = PoemFormat{4, 5};
  poem.sentences = {"UABVX", "CUVDA", "XVCGW", "ECUVB"};
  return poem;
}

// Single mutations of fixture_poem(), one per rule, each violating exactly
// that rule (worked out against the enumeration oracle):
//   1: drop the last sentence            2: drop the 3rd char of s1
//   3: s2 ending A -> U (even ends Ze)   4: s4 ending B -> D (class 2 vs 1)
//   5: s1 4th char V -> D (P vs P)       6: s3 2nd char V -> A (odd differs)
//   7: s1 3rd char B -> U (all Ze)       8: s4 1st char E -> U (isolated Ping)
inline Poem fixture_mutation(int rule) {
  Poem poem = fixture_poem();
  switch (rule) {
    case 1: poem.sentences.pop_back(); break;
    case 2: poem.sentences[0] = "UAVX"; break;
    case 3: poem.sentences[1] = "CUVDU"; break;
    case 4: poem.sentences[3] = "ECUVD"; break;
    case 5: poem.sentences[0] = "UABDX"; break;
    case 6: poem.sentences[2] = "XACGW"; break;
    case 7: poem.sentences[0] = "UAUVX"; break;
    case 8: poem.sentences[3] = "UCUVB"; break;
    default: break;
  }
  return poem;
}

// ---------------------------------------------------------------------------
// Oracle dictionary: 12 characters, up to 3 pronunciations each, used for
// randomized verifier-vs-oracle comparison.
// ---------------------------------------------------------------------------
inline RhymeDictionary oracle_dictionary() {
  RhymeDictionary dict;
  dict.add("a", {Tone::kPing, 1});
  dict.add("b", {Tone::kPing, 1});
  dict.add("c", {Tone::kPing, 2});
  dict.add("d", {Tone::kZe, 60});
  dict.add("e", {Tone::kZe, 60});
  dict.add("f", {Tone::kZe, 61});
  dict.add("g", {Tone::kPing, 1});
  dict.add("g", {Tone::kZe, 60});
  dict.add("h", {Tone::kPing, 2});
  dict.add("h", {Tone::kZe, 61});
  dict.add("i", {Tone::kPing, 3});
  dict.add("j", {Tone::kZe, 61});
  dict.add("k", {Tone::kPing, 1});
  dict.add("k", {Tone::kPing, 2});
  dict.add("k", {Tone::kZe, 60});
  dict.add("l", {Tone::kZe, 60});
  dict.add("l", {Tone::kPing, 3});
  return dict;
}

// utf8 splitting for the oracle without pulling the library helper into the
// oracle's logic (it is pure input handling).
inline std::vector<std::string> utf8_chars(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char lead = static_cast<unsigned char>(text[i]);
    std::size_t len = lead < 0x80 ? 1 : (lead & 0xE0) == 0xC0 ? 2 : (lead & 0xF0) == 0xE0 ? 3 : 4;
    out.push_back(text.substr(i, len));
    i += len;
  }
  return out;
}

// Enumerates every pronunciation assignment of `poem` and applies
// check_rule for all eight rules; the poem passes when some assignment
// satisfies them all. Exactly the strict-mode definition, by brute force.
inline bool oracle_poem_valid(const Poem& poem, const RhymeDictionary& dict,
                              const VerifyOptions& opts = {}) {
  std::vector<std::vector<std::vector<Pronunciation>>> options;  // [sentence][pos]
  for (const auto& sentence : poem.sentences) {
    std::vector<std::vector<Pronunciation>> row;
    for (const auto& ch : utf8_chars(sentence)) {
      auto prons = dict.lookup(ch);
      row.emplace_back(prons.begin(), prons.end());
    }
    options.push_back(std::move(row));
  }
  Assignment assignment(options.size());
  for (std::size_t s = 0; s < options.size(); ++s) {
    assignment[s].resize(options[s].size(), Pronunciation{Tone::kPing, 1});
  }
  std::function<bool(std::size_t, std::size_t)> recurse = [&](std::size_t s,
                                                              std::size_t p) -> bool {
    if (s == options.size()) {
      for (int rule = 1; rule <= 8; ++rule) {
        if (check_rule(rule, poem, assignment, opts)) return false;
      }
      return true;
    }
    if (p == options[s].size()) return recurse(s + 1, 0);
    for (const Pronunciation& pron : options[s][p]) {
      assignment[s][p] = pron;
      if (recurse(s, p + 1)) return true;
    }
    return false;
  };
  return recurse(0, 0);
}

// Simple deterministic RNG for test data (xorshift-style).
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

  std::uint64_t next() {
    state_ ^= state_ << 13;
    state_ ^= state_ >> 7;
    state_ ^= state_ << 17;
    return state_;
  }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Boilerplate-free templates whose every rendered character comes from the
// poem or title, so tiny test vocabularies suffice.
inline PromptTemplates plain_templates() {
  PromptTemplates t;
  t.generation = "{title}{sentences}";
  t.title_score = "{mask}{sentences}";
  t.sentence_score = "{title}{sentences}";
  t.separator = "";
  return t;
}

}  // namespace bipro::testing

#endif  // BIPRO_TESTS_TEST_SUPPORT_H_
