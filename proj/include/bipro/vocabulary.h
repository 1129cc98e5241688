#ifndef BIPRO_VOCABULARY_H_
#define BIPRO_VOCABULARY_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bipro {

/// Immutable token inventory shared by model backends. For the poem task a
/// token is one character, but nothing here assumes that.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Takes ownership of `tokens`; ids are assigned by position. Throws
  /// ConfigError on empty or duplicate tokens.
  explicit Vocabulary(std::vector<std::string> tokens);

  /// Vocabulary of the distinct characters of `text`, sorted by byte value
  /// so construction is deterministic regardless of input order.
  static Vocabulary from_text(std::string_view text);

  std::size_t size() const { return tokens_.size(); }
  bool contains(const std::string& token) const { return index_.count(token) != 0; }

  /// Throws VocabularyError when the token is unknown.
  int id_of(const std::string& token) const;

  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::span<const std::string> tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int> index_;
};

}  // namespace bipro

#endif  // BIPRO_VOCABULARY_H_
