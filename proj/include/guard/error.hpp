#ifndef GUARD_ERROR_HPP
#define GUARD_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace guard {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Raised when a term is built from children whose sorts do not fit the operator.
class SortError : public Error {
public:
  using Error::Error;
};

// Malformed input text. `line` is 1-based when known.
class ParseError : public Error {
public:
  ParseError(const std::string &msg, std::optional<int> line = std::nullopt)
    : Error(line ? "line " + std::to_string(*line) + ": " + msg : msg)
    , line_{line}
    , detail_{msg}
  {}

  std::optional<int> line() const { return line_; }
  const std::string &detail() const { return detail_; }

private:
  std::optional<int> line_;
  std::string detail_;
};

// The solver could not be run at all (missing binary, crash). Never an Unknown verdict.
class SolverEnvironmentError : public Error {
public:
  using Error::Error;
};

class ModelParseError : public Error {
public:
  ModelParseError(const std::string &msg, std::string raw)
    : Error(msg)
    , raw_{std::move(raw)}
  {}
  const std::string &raw() const { return raw_; }

private:
  std::string raw_;
};

// Well-formed input that falls outside the verifiable subset.
struct UnsupportedFeature {
  std::string feature;
  std::optional<int> line;

  bool operator==(const UnsupportedFeature &) const = default;
};

// Thrown inside parsers to unwind to the entry point, which turns it back
// into an UnsupportedFeature value.
class UnsupportedConstruct : public Error {
public:
  explicit UnsupportedConstruct(UnsupportedFeature f)
    : Error("unsupported feature '" + f.feature + "'"
            + (f.line ? " at line " + std::to_string(*f.line) : std::string{}))
    , feature_{std::move(f)}
  {}
  const UnsupportedFeature &feature() const { return feature_; }

private:
  UnsupportedFeature feature_;
};

} // namespace guard

#endif // GUARD_ERROR_HPP
