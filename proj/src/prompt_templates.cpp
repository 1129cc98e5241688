#include "bipro/prompt_templates.h"

#include <fstream>
#include <sstream>

#include "bipro/errors.h"
#include "bipro/utf8.h"

namespace bipro {
namespace {

enum class PieceKind { kLiteral, kTitle, kSentences, kMask };

struct Piece {
  PieceKind kind;
  std::string literal;
};

std::vector<Piece> parse_template(const std::string& tmpl) {
  std::vector<Piece> pieces;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find('{', pos);
    if (open == std::string::npos) {
      pieces.push_back({PieceKind::kLiteral, tmpl.substr(pos)});
      break;
    }
    if (open > pos) pieces.push_back({PieceKind::kLiteral, tmpl.substr(pos, open - pos)});
    std::size_t close = tmpl.find('}', open);
    if (close == std::string::npos) {
      throw ConfigError("unterminated placeholder in template: " + tmpl);
    }
    std::string name = tmpl.substr(open + 1, close - open - 1);
    if (name == "title") {
      pieces.push_back({PieceKind::kTitle, {}});
    } else if (name == "sentences") {
      pieces.push_back({PieceKind::kSentences, {}});
    } else if (name == "mask") {
      pieces.push_back({PieceKind::kMask, {}});
    } else {
      throw ConfigError("unknown placeholder {" + name + "} in template: " + tmpl);
    }
    pos = close + 1;
  }
  return pieces;
}

int count_kind(const std::vector<Piece>& pieces, PieceKind kind) {
  int n = 0;
  for (const auto& p : pieces) {
    if (p.kind == kind) ++n;
  }
  return n;
}

// Renders a template into text before and after the mask slot. masked_slot:
// -1 = the template's {mask} placeholder (title masking); otherwise the
// 0-based sentence slot inside {sentences}. total_slots covers a pending
// slot one past the current sentence count. masked_slot < 0 with
// want_mask = false renders everything (no mask slot).
struct Rendered {
  std::string before;
  std::string after;
  bool mask_seen = false;
};

Rendered render(const std::vector<Piece>& pieces, const std::string& title,
                const std::vector<std::string>& sentences, int masked_slot, int total_slots,
                const std::string& separator) {
  Rendered out;
  auto emit = [&](const std::string& text) {
    (out.mask_seen ? out.after : out.before) += text;
  };
  for (const auto& piece : pieces) {
    switch (piece.kind) {
      case PieceKind::kLiteral:
        emit(piece.literal);
        break;
      case PieceKind::kTitle:
        emit(title);
        break;
      case PieceKind::kMask:
        if (out.mask_seen) throw ConfigError("template renders more than one mask");
        out.mask_seen = true;
        break;
      case PieceKind::kSentences: {
        for (int j = 0; j < total_slots; ++j) {
          if (j > 0) emit(separator);
          if (j == masked_slot) {
            if (out.mask_seen) throw ConfigError("template renders more than one mask");
            out.mask_seen = true;
          } else {
            emit(sentences[static_cast<std::size_t>(j)]);
          }
        }
        break;
      }
    }
  }
  return out;
}

std::string unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char next = s[++i];
      if (next == 'n') {
        out += '\n';
      } else if (next == 't') {
        out += '\t';
      } else if (next == '\\') {
        out += '\\';
      } else {
        out += '\\';
        out += next;
      }
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void PromptTemplates::validate() const {
  auto gen = parse_template(generation);
  auto title = parse_template(title_score);
  auto sent = parse_template(sentence_score);
  if (count_kind(gen, PieceKind::kSentences) != 1 || count_kind(gen, PieceKind::kMask) != 0) {
    throw ConfigError("generation template needs exactly one {sentences} and no {mask}");
  }
  if (count_kind(sent, PieceKind::kSentences) != 1 || count_kind(sent, PieceKind::kMask) != 0) {
    throw ConfigError("sentence_score template needs exactly one {sentences} and no {mask}");
  }
  if (count_kind(title, PieceKind::kMask) != 1) {
    throw ConfigError("title_score template needs exactly one {mask}");
  }
  if (count_kind(title, PieceKind::kSentences) > 1) {
    throw ConfigError("title_score template may use {sentences} at most once");
  }
}

PromptTemplates PromptTemplates::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open templates file: " + path);
  return parse(in, path);
}

PromptTemplates PromptTemplates::parse(std::istream& in, const std::string& origin) {
  PromptTemplates t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ParseError(origin + ": expected `key = value`", line_no);
    }
    std::string key = strip(trimmed.substr(0, eq));
    std::string value = unescape(strip(trimmed.substr(eq + 1)));
    if (key == "generation") {
      t.generation = value;
    } else if (key == "title_score") {
      t.title_score = value;
    } else if (key == "sentence_score") {
      t.sentence_score = value;
    } else if (key == "separator") {
      t.separator = value;
    } else {
      throw ParseError(origin + ": unknown template key \"" + key + "\"", line_no);
    }
  }
  t.validate();
  return t;
}

RenderedPrompt make_bipro_prompt(const std::string& title, const Poem& poem,
                                 MaskTarget masked, const PromptTemplates& templates) {
  RenderedPrompt out;
  const int count = static_cast<int>(poem.sentences.size());
  if (masked.kind == MaskTarget::Kind::kTitle) {
    if (title.empty()) throw InputError("cannot mask an empty title");
    auto pieces = parse_template(templates.title_score);
    Rendered r = render(pieces, title, poem.sentences, /*masked_slot=*/-1, count,
                        templates.separator);
    if (!r.mask_seen) throw ConfigError("title_score template produced no mask");
    out.context = BlockContext::from_strings(r.before, r.after);
    out.target = utf8::split(title);
  } else {
    if (masked.sentence_index < 0 || masked.sentence_index >= count) {
      throw InputError("masked sentence index " + std::to_string(masked.sentence_index) +
                       " out of range");
    }
    const std::string& content = poem.sentences[static_cast<std::size_t>(masked.sentence_index)];
    if (content.empty()) throw InputError("cannot mask an empty sentence");
    auto pieces = parse_template(templates.sentence_score);
    Rendered r = render(pieces, title, poem.sentences, masked.sentence_index, count,
                        templates.separator);
    if (!r.mask_seen) throw ConfigError("sentence_score template produced no mask");
    out.context = BlockContext::from_strings(r.before, r.after);
    out.target = utf8::split(content);
  }
  return out;
}

BlockContext make_generation_context(const std::string& title, const Poem& poem,
                                     int sentence_index, const PromptTemplates& templates) {
  const int count = static_cast<int>(poem.sentences.size());
  if (sentence_index < 0 || sentence_index > count) {
    throw InputError("generation slot " + std::to_string(sentence_index) + " out of range");
  }
  std::vector<std::string> sentences = poem.sentences;
  int total = count;
  if (sentence_index == count) total = count + 1;  // fresh slot at the end
  if (total > static_cast<int>(sentences.size())) sentences.resize(static_cast<std::size_t>(total));
  auto pieces = parse_template(templates.generation);
  Rendered r = render(pieces, title, sentences, sentence_index, total, templates.separator);
  if (!r.mask_seen) throw ConfigError("generation template produced no mask");
  return BlockContext::from_strings(r.before, r.after);
}

std::string render_complete(const std::string& title, const Poem& poem,
                            const std::string& template_str,
                            const PromptTemplates& templates) {
  auto pieces = parse_template(template_str);
  // Render with the title standing in for {mask} so nothing is masked out.
  std::string out;
  for (const auto& piece : pieces) {
    switch (piece.kind) {
      case PieceKind::kLiteral:
        out += piece.literal;
        break;
      case PieceKind::kTitle:
      case PieceKind::kMask:
        out += title;
        break;
      case PieceKind::kSentences: {
        for (std::size_t j = 0; j < poem.sentences.size(); ++j) {
          if (j > 0) out += templates.separator;
          out += poem.sentences[j];
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace bipro
