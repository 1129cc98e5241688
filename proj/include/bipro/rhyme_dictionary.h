#ifndef BIPRO_RHYME_DICTIONARY_H_
#define BIPRO_RHYME_DICTIONARY_H_

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bipro {

/// The two major tone categories of the Pingshui system.
enum class Tone { kPing, kZe };

const char* tone_name(Tone tone);

/// One reading of a character: its tone plus one of the 106 rhyme
/// sub-classes.
struct Pronunciation {
  Tone tone;
  int rhyme_id;  // 1..106

  bool operator==(const Pronunciation&) const = default;
  auto operator<=>(const Pronunciation&) const = default;
};

/// Character -> set of pronunciations; ground truth for all format rules.
/// Immutable once loaded; safe to share across threads.
class RhymeDictionary {
 public:
  static constexpr int kMaxRhymeId = 106;

  /// Adds one pronunciation, deduplicating repeats. Throws ParseError on a
  /// rhyme id outside [1, 106] and on a rhyme class that would span both
  /// tones.
  void add(const std::string& character, Pronunciation pron);

  /// Loads the tab-separated format: `<character>\t<P|Z>\t<rhyme_id>`,
  /// `#`-prefixed comment lines and blank lines ignored. Parse failures name
  /// the offending line.
  static RhymeDictionary load_file(const std::string& path);
  static RhymeDictionary parse(std::istream& in, const std::string& origin);

  bool contains(const std::string& character) const;

  /// Pronunciations of a character; throws VocabularyError when unknown.
  std::span<const Pronunciation> lookup(const std::string& character) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Characters in byte order (deterministic iteration).
  std::vector<std::string> characters() const;

 private:
  std::map<std::string, std::vector<Pronunciation>> entries_;
  std::map<int, Tone> rhyme_tone_;  // each rhyme class belongs to one tone
};

}  // namespace bipro

#endif  // BIPRO_RHYME_DICTIONARY_H_
