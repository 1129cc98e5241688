#ifndef BIPRO_POEM_H_
#define BIPRO_POEM_H_

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bipro {

/// One of the four traditional forms: Jueju = 4 sentences, Lvshi = 8;
/// sentences uniformly 5 or 7 characters.
struct PoemFormat {
  int sentence_count = 4;
  int sentence_length = 5;

  /// Canonical name: "5-Jueju", "7-Jueju", "5-Lvshi" or "7-Lvshi".
  std::string name() const;

  /// Accepts the canonical names case-insensitively; throws ParseError
  /// otherwise.
  static PoemFormat parse(std::string_view name);

  bool operator==(const PoemFormat&) const = default;
};

struct Poem {
  std::string title;
  std::vector<std::string> sentences;  // UTF-8, one string per sentence
  PoemFormat format;

  nlohmann::ordered_json to_json() const;
  static Poem from_json(const nlohmann::json& j);
};

}  // namespace bipro

#endif  // BIPRO_POEM_H_
