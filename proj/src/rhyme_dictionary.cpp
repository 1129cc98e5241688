#include "bipro/rhyme_dictionary.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bipro/errors.h"
#include "bipro/utf8.h"

namespace bipro {
namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

const char* tone_name(Tone tone) { return tone == Tone::kPing ? "Ping" : "Ze"; }

void RhymeDictionary::add(const std::string& character, Pronunciation pron) {
  if (character.empty() || utf8::length(character) != 1) {
    throw ParseError("dictionary entry must be a single character, got \"" + character + "\"");
  }
  if (pron.rhyme_id < 1 || pron.rhyme_id > kMaxRhymeId) {
    throw ParseError("rhyme id " + std::to_string(pron.rhyme_id) + " outside [1, " +
                     std::to_string(kMaxRhymeId) + "]");
  }
  auto [it, inserted] = rhyme_tone_.emplace(pron.rhyme_id, pron.tone);
  if (!inserted && it->second != pron.tone) {
    throw ParseError("rhyme class " + std::to_string(pron.rhyme_id) +
                     " spans both tone categories");
  }
  auto& prons = entries_[character];
  if (std::find(prons.begin(), prons.end(), pron) == prons.end()) {
    prons.push_back(pron);
  }
}

RhymeDictionary RhymeDictionary::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dictionary file: " + path);
  return parse(in, path);
}

RhymeDictionary RhymeDictionary::parse(std::istream& in, const std::string& origin) {
  RhymeDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = trimmed.find('\t', start);
      fields.push_back(strip(trimmed.substr(start, tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      throw ParseError(origin + ": expected <char>\\t<P|Z>\\t<rhyme_id>", line_no);
    }

    Tone tone;
    if (fields[1] == "P") {
      tone = Tone::kPing;
    } else if (fields[1] == "Z") {
      tone = Tone::kZe;
    } else {
      throw ParseError(origin + ": tone must be P or Z, got \"" + fields[1] + "\"", line_no);
    }

    int rhyme_id = 0;
    try {
      std::size_t consumed = 0;
      rhyme_id = std::stoi(fields[2], &consumed);
      if (consumed != fields[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(origin + ": rhyme id must be an integer, got \"" + fields[2] + "\"",
                       line_no);
    }

    try {
      dict.add(fields[0], Pronunciation{tone, rhyme_id});
    } catch (const ParseError& e) {
      throw ParseError(origin + ": " + e.what(), line_no);
    }
  }
  return dict;
}

bool RhymeDictionary::contains(const std::string& character) const {
  return entries_.count(character) != 0;
}

std::span<const Pronunciation> RhymeDictionary::lookup(const std::string& character) const {
  auto it = entries_.find(character);
  if (it == entries_.end()) {
    throw VocabularyError("character not in rhyme dictionary: \"" + character + "\"");
  }
  return it->second;
}

std::vector<std::string> RhymeDictionary::characters() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [ch, _] : entries_) out.push_back(ch);
  return out;
}

}  // namespace bipro
