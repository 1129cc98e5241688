#include "bipro/vocabulary.h"

#include <algorithm>
#include <set>

#include "bipro/errors.h"
#include "bipro/utf8.h"

namespace bipro {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw ConfigError("vocabulary must not be empty");
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw ConfigError("vocabulary token must not be empty");
    auto [it, inserted] = index_.emplace(tokens_[i], static_cast<int>(i));
    if (!inserted) throw ConfigError("duplicate vocabulary token: " + tokens_[i]);
  }
}

Vocabulary Vocabulary::from_text(std::string_view text) {
  std::set<std::string> unique;
  for (auto& ch : utf8::split(text)) unique.insert(std::move(ch));
  return Vocabulary(std::vector<std::string>(unique.begin(), unique.end()));
}

int Vocabulary::id_of(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw VocabularyError("token not in vocabulary: \"" + token + "\"");
  return it->second;
}

}  // namespace bipro
