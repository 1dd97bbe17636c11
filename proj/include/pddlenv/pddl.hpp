#ifndef PDDLENV_PDDL_HPP
#define PDDLENV_PDDL_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pddlenv/errors.hpp"
#include "pddlenv/model.hpp"

namespace pddlenv::pddl {

struct SourceSpan {
  std::string file;
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public Error {
 public:
  enum class Kind { Lex, Syntax, Declaration, Typing, UnsupportedFeature };

  ParseError(Kind kind, std::string message, SourceSpan span);

  Kind kind() const { return kind_; }
  const SourceSpan& span() const { return span_; }
  /// The message without the location prefix.
  const std::string& message() const { return message_; }

 private:
  Kind kind_;
  std::string message_;
  SourceSpan span_;
};

std::string_view to_string(ParseError::Kind kind);

struct Token {
  enum class Kind { LParen, RParen, Keyword, Identifier, Variable, Dash, Number };

  Kind kind;
  std::string text;  // lowercased except numbers
  SourceSpan span;
};

/// Splits PDDL text into tokens. `;` starts a comment running to the end of
/// the line, except that a comment of the form `; (:actions a b ...)` is
/// read as an action-predicate declaration for compatibility with domain
/// files that keep that declaration in a comment.
std::vector<Token> tokenize(std::string_view text, std::string_view file = "<input>");

Domain parse_domain(std::string_view text, std::string_view file = "<domain>");
Problem parse_problem(std::string_view text, const Domain& domain, std::string_view file = "<problem>");

std::string serialize_domain(const Domain& d);
std::string serialize_problem(const Problem& p);

/// A sequence of ground atoms such as `(move d1 peg2) (pickup a)`, as used
/// by plan files and traces. `;` comments are skipped.
std::vector<GroundAction> parse_ground_actions(std::string_view text, std::string_view file = "<actions>");

/// Whole-file read; throws IoError.
std::string read_file(const std::filesystem::path& path);

}  // namespace pddlenv::pddl

#endif  // PDDLENV_PDDL_HPP
