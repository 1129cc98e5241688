#ifndef BIPRO_UTF8_H_
#define BIPRO_UTF8_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bipro::utf8 {

/// Split UTF-8 text into one string per code point. Throws ParseError on
/// malformed sequences.
std::vector<std::string> split(std::string_view text);

/// Concatenate tokens back into a string (inverse of split for
/// character-level tokens).
std::string join(std::span<const std::string> tokens);

/// Number of code points in `text`.
std::size_t length(std::string_view text);

}  // namespace bipro::utf8

#endif  // BIPRO_UTF8_H_
