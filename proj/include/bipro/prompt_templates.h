#ifndef BIPRO_PROMPT_TEMPLATES_H_
#define BIPRO_PROMPT_TEMPLATES_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "bipro/model_backend.h"
#include "bipro/poem.h"

namespace bipro {

/// Templates turning a (title, sentences) pair into a block prompt. The
/// placeholders are `{title}`, `{sentences}` and `{mask}`:
///
///  * title_score masks the title, so it carries an explicit `{mask}` where
///    the title would sit.
///  * generation and sentence_score mask one sentence; the mask slot lives
///    inside `{sentences}`, which renders all sentences joined by
///    `separator` with the selected one replaced by the mask.
///
/// Every rendered prompt contains exactly one mask slot. The shipped
/// defaults phrase the context as a titled-poem cloze; all of them are
/// user-overridable because the exact phrasing is a free choice.
struct PromptTemplates {
  std::string generation = "\xE3\x80\x8A{title}\xE3\x80\x8B{sentences}";     // 《{title}》…
  std::string title_score = "\xE3\x80\x8A{mask}\xE3\x80\x8B{sentences}";     // 《{mask}》…
  std::string sentence_score = "\xE3\x80\x8A{title}\xE3\x80\x8B{sentences}"; // 《{title}》…
  std::string separator = "\xEF\xBC\x8C";                                    // ，

  /// Throws ConfigError when a template is missing its required placeholder
  /// or contains an unknown one.
  void validate() const;

  /// `key = value` lines; `\n`, `\t` and `\\` escapes in values; `#` starts
  /// a comment. Keys: generation, title_score, sentence_score, separator.
  static PromptTemplates load_file(const std::string& path);
  static PromptTemplates parse(std::istream& in, const std::string& origin);
};

/// What to mask when building a scoring prompt.
struct MaskTarget {
  enum class Kind { kTitle, kSentence };
  Kind kind = Kind::kTitle;
  int sentence_index = 0;  // 0-based, used when kind == kSentence

  static MaskTarget title() { return {Kind::kTitle, 0}; }
  static MaskTarget sentence(int index) { return {Kind::kSentence, index}; }
};

struct RenderedPrompt {
  BlockContext context;
  std::vector<std::string> target;  // tokens of the masked content
};

/// Builds the block context with the selected content masked out; the target
/// is exactly the masked content's tokens. Throws InputError when the
/// selector points at missing or empty content.
RenderedPrompt make_bipro_prompt(const std::string& title, const Poem& poem,
                                 MaskTarget masked, const PromptTemplates& templates);

/// Context for generating sentence `sentence_index` (0-based). The slot may
/// be poem.sentences.size() (a fresh sentence appended at the end) or an
/// existing slot being regenerated, whose current content is ignored.
BlockContext make_generation_context(const std::string& title, const Poem& poem,
                                     int sentence_index, const PromptTemplates& templates);

/// The fully rendered text of `template_str` with nothing masked; the
/// reconstruction identity prefix + target + suffix == render_complete holds
/// for every prompt built from the same template.
std::string render_complete(const std::string& title, const Poem& poem,
                            const std::string& template_str,
                            const PromptTemplates& templates);

}  // namespace bipro

#endif  // BIPRO_PROMPT_TEMPLATES_H_
