#include "bipro/poem.h"

#include <array>
#include <cctype>

#include <nlohmann/json.hpp>

#include "bipro/errors.h"

namespace bipro {
namespace {

std::string lowered(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string PoemFormat::name() const {
  std::string n = std::to_string(sentence_length) + "-";
  n += sentence_count == 4 ? "Jueju" : "Lvshi";
  return n;
}

PoemFormat PoemFormat::parse(std::string_view name) {
  static constexpr std::array<std::pair<const char*, PoemFormat>, 4> kForms = {{
      {"5-jueju", {4, 5}},
      {"7-jueju", {4, 7}},
      {"5-lvshi", {8, 5}},
      {"7-lvshi", {8, 7}},
  }};
  std::string key = lowered(name);
  for (const auto& [n, f] : kForms) {
    if (key == n) return f;
  }
  throw ParseError("unknown poem format: \"" + std::string(name) +
                   "\" (expected 5-Jueju, 7-Jueju, 5-Lvshi or 7-Lvshi)");
}

nlohmann::ordered_json Poem::to_json() const {
  nlohmann::ordered_json j;
  j["title"] = title;
  j["format"] = format.name();
  j["sentences"] = sentences;
  return j;
}

Poem Poem::from_json(const nlohmann::json& j) {
  Poem poem;
  try {
    poem.title = j.at("title").get<std::string>();
    poem.format = PoemFormat::parse(j.at("format").get<std::string>());
    poem.sentences = j.at("sentences").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid poem JSON: ") + e.what());
  }
  return poem;
}

}  // namespace bipro
