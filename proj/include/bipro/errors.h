#ifndef BIPRO_ERRORS_H_
#define BIPRO_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bipro {

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file (dictionary, templates, poem JSON, CSV).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A token that the active vocabulary or dictionary does not know.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

/// Unknown token inside a scoring/generation context.
class ContextError : public Error {
 public:
  using Error::Error;
};

/// Remote backend could not be reached or answered garbage.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Bad user-supplied data (mixed poem ids, empty record sets, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value (weights out of range, bad template, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bipro

#endif  // BIPRO_ERRORS_H_
