#include "bipro/utf8.h"

#include "bipro/errors.h"

namespace bipro::utf8 {
namespace {

// Returns the byte length of the sequence starting at `text[pos]`.
std::size_t sequence_length(std::string_view text, std::size_t pos) {
  unsigned char lead = static_cast<unsigned char>(text[pos]);
  std::size_t len;
  if (lead < 0x80) {
    len = 1;
  } else if ((lead & 0xE0) == 0xC0) {
    len = 2;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
  } else {
    throw ParseError("invalid UTF-8 lead byte at offset " + std::to_string(pos));
  }
  if (pos + len > text.size()) {
    throw ParseError("truncated UTF-8 sequence at offset " + std::to_string(pos));
  }
  for (std::size_t i = 1; i < len; ++i) {
    unsigned char c = static_cast<unsigned char>(text[pos + i]);
    if ((c & 0xC0) != 0x80) {
      throw ParseError("invalid UTF-8 continuation byte at offset " +
                       std::to_string(pos + i));
    }
  }
  return len;
}

}  // namespace

std::vector<std::string> split(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t len = sequence_length(text, pos);
    out.emplace_back(text.substr(pos, len));
    pos += len;
  }
  return out;
}

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) out += t;
  return out;
}

std::size_t length(std::string_view text) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    pos += sequence_length(text, pos);
    ++n;
  }
  return n;
}

}  // namespace bipro::utf8
