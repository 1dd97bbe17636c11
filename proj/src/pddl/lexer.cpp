#include <cctype>
#include <fstream>
#include <sstream>

#include "pddlenv/pddl.hpp"

namespace pddlenv::pddl {

namespace {

std::string format_error(ParseError::Kind kind, const std::string& message, const SourceSpan& span) {
  std::ostringstream os;
  os << span.file << ":" << span.line << ":" << span.column << ": " << to_string(kind) << " error: " << message;
  return os.str();
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

class Lexer {
 public:
  Lexer(std::string_view text, std::string_view file) : text_(text), file_(file) {}

  std::vector<Token> run() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == ';') {
        comment();
      } else {
        token();
      }
    }
    return std::move(tokens_);
  }

 private:
  SourceSpan here() const { return {file_, line_, column_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void comment() {
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view body = text_.substr(pos_ + 1, end - pos_ - 1);
    std::size_t first = body.find_first_not_of(" \t;");
    bool declares_actions = first != std::string_view::npos && body.substr(first).rfind("(:actions", 0) == 0;
    if (!declares_actions) {
      while (pos_ < end) advance();
      return;
    }
    // Lex the remainder of the line as ordinary tokens.
    while (pos_ < end && text_[pos_] != '(') advance();
    while (pos_ < end) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == ';') {
        while (pos_ < end) advance();
      } else {
        token();
      }
    }
  }

  void token() {
    SourceSpan span = here();
    char c = text_[pos_];
    if (c == '(' || c == ')') {
      advance();
      tokens_.push_back({c == '(' ? Token::Kind::LParen : Token::Kind::RParen, std::string(1, c), span});
      return;
    }
    if (c == '?' || c == ':') {
      advance();
      std::string name(1, c);
      while (pos_ < text_.size() && is_name_char(text_[pos_])) {
        name += lower(text_[pos_]);
        advance();
      }
      if (name.size() == 1)
        throw ParseError(ParseError::Kind::Lex, std::string("expected a name after '") + c + "'", span);
      tokens_.push_back({c == '?' ? Token::Kind::Variable : Token::Kind::Keyword, std::move(name), span});
      return;
    }
    if (c == '-') {
      advance();
      tokens_.push_back({Token::Kind::Dash, "-", span});
      return;
    }
    if (c == '=') {
      advance();
      tokens_.push_back({Token::Kind::Identifier, "=", span});
      return;
    }
    bool digit = std::isdigit(static_cast<unsigned char>(c));
    bool dot_number = c == '.' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]));
    if (digit || dot_number) {
      number(span);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos_ < text_.size() && is_name_char(text_[pos_])) {
        name += lower(text_[pos_]);
        advance();
      }
      tokens_.push_back({Token::Kind::Identifier, std::move(name), span});
      return;
    }
    std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + std::to_string(int(static_cast<unsigned char>(c)));
    throw ParseError(ParseError::Kind::Lex, "illegal character '" + shown + "'", span);
  }

  // Digits with an optional fraction or "/denominator". A digit run that
  // continues with letters is a name such as "1st".
  void number(const SourceSpan& span) {
    std::string text;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        text += text_[pos_];
        advance();
      }
    };
    digits();
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == '/')) {
      text += text_[pos_];
      advance();
      std::size_t before = text.size();
      digits();
      if (text.size() == before) throw ParseError(ParseError::Kind::Lex, "malformed number '" + text + "'", span);
    } else if (pos_ < text_.size() && is_name_char(text_[pos_])) {
      while (pos_ < text_.size() && is_name_char(text_[pos_])) {
        text += lower(text_[pos_]);
        advance();
      }
      tokens_.push_back({Token::Kind::Identifier, std::move(text), span});
      return;
    }
    if (pos_ < text_.size() && (is_name_char(text_[pos_]) || text_[pos_] == '.'))
      throw ParseError(ParseError::Kind::Lex, "malformed number '" + text + text_[pos_] + "'", span);
    tokens_.push_back({Token::Kind::Number, std::move(text), span});
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  std::vector<Token> tokens_;
};

}  // namespace

ParseError::ParseError(Kind kind, std::string message, SourceSpan span)
    : Error(format_error(kind, message, span)), kind_(kind), message_(std::move(message)), span_(std::move(span)) {}

std::string_view to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Lex:
      return "lex";
    case ParseError::Kind::Syntax:
      return "syntax";
    case ParseError::Kind::Declaration:
      return "declaration";
    case ParseError::Kind::Typing:
      return "typing";
    case ParseError::Kind::UnsupportedFeature:
      return "unsupported-feature";
  }
  return "unknown";
}

std::vector<Token> tokenize(std::string_view text, std::string_view file) { return Lexer(text, file).run(); }

std::vector<GroundAction> parse_ground_actions(std::string_view text, std::string_view file) {
  auto tokens = tokenize(text, file);
  std::vector<GroundAction> plan;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (tokens[i].kind != Token::Kind::LParen)
      throw ParseError(ParseError::Kind::Syntax, "expected '(' to start an action", tokens[i].span);
    const auto& open_span = tokens[i].span;
    ++i;
    if (i >= tokens.size() || tokens[i].kind != Token::Kind::Identifier)
      throw ParseError(ParseError::Kind::Syntax, "expected an action predicate name", open_span);
    GroundAction a{Literal{tokens[i].text, {}, false}};
    ++i;
    while (i < tokens.size() && tokens[i].kind != Token::Kind::RParen) {
      if (tokens[i].kind != Token::Kind::Identifier && tokens[i].kind != Token::Kind::Number)
        throw ParseError(ParseError::Kind::Syntax, "expected an object name, found '" + tokens[i].text + "'",
                         tokens[i].span);
      a.literal.args.push_back(Term::constant(tokens[i].text));
      ++i;
    }
    if (i >= tokens.size()) throw ParseError(ParseError::Kind::Syntax, "unclosed '('", open_span);
    ++i;
    plan.push_back(std::move(a));
  }
  return plan;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

}  // namespace pddlenv::pddl
