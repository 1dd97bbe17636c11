#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "pddlenv/inference.hpp"
#include "pddlenv/pddl.hpp"

namespace pddlenv::pddl {

namespace {

constexpr std::size_t kMaxDepth = 256;

using Kind = ParseError::Kind;

// ---------------------------------------------------------------------------
// S-expressions

struct SExpr {
  bool is_list = false;
  Token token;  // the atom, or the opening parenthesis of a list
  std::vector<SExpr> items;

  const SourceSpan& span() const { return token.span; }
  bool is_atom(Token::Kind k) const { return !is_list && token.kind == k; }
  bool is_keyword(std::string_view kw) const { return is_atom(Token::Kind::Keyword) && token.text == kw; }
  /// Leading identifier or keyword of a list ("" for other lists).
  std::string head() const {
    if (!is_list || items.empty() || items[0].is_list) return "";
    return items[0].token.text;
  }
};

std::string describe(const SExpr& e) {
  if (e.is_list) return e.items.empty() ? "'()'" : "list starting with '" + (e.items[0].is_list ? std::string("(") : e.items[0].token.text) + "'";
  return "'" + e.token.text + "'";
}

class Reader {
 public:
  explicit Reader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  SExpr read_document(std::string_view file) {
    if (tokens_.empty()) throw ParseError(Kind::Syntax, "empty input; expected '(define ...)'", {std::string(file), 1, 1});
    SExpr e = read(0);
    if (pos_ < tokens_.size())
      throw ParseError(Kind::Syntax, "unexpected '" + tokens_[pos_].text + "' after the closing ')' of define",
                       tokens_[pos_].span);
    if (!e.is_list) throw ParseError(Kind::Syntax, "expected '(define ...)', found " + describe(e), e.span());
    return e;
  }

 private:
  SExpr read(std::size_t depth) {
    const Token& t = tokens_[pos_++];
    if (t.kind == Token::Kind::RParen) throw ParseError(Kind::Syntax, "unexpected ')'", t.span);
    SExpr e;
    e.token = t;
    if (t.kind != Token::Kind::LParen) return e;
    if (depth >= kMaxDepth)
      throw ParseError(Kind::Syntax, "nesting deeper than " + std::to_string(kMaxDepth) + " levels", t.span);
    e.is_list = true;
    while (true) {
      if (pos_ >= tokens_.size()) throw ParseError(Kind::Syntax, "unclosed '(' (missing ')')", t.span);
      if (tokens_[pos_].kind == Token::Kind::RParen) {
        ++pos_;
        return e;
      }
      e.items.push_back(read(depth + 1));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

[[noreturn]] void fail(Kind kind, const std::string& message, const SExpr& at) {
  throw ParseError(kind, message, at.span());
}

const std::string& name_of(const SExpr& e, const std::string& what) {
  if (e.is_atom(Token::Kind::Identifier) || e.is_atom(Token::Kind::Number)) return e.token.text;
  fail(Kind::Syntax, "expected " + what + ", found " + describe(e), e);
}

const SExpr& expect_list(const SExpr& e, const std::string& what) {
  if (!e.is_list) fail(Kind::Syntax, "expected " + what + ", found " + describe(e), e);
  return e;
}

struct TypedName {
  std::string name;
  std::string type;
  const SExpr* at;
  const SExpr* type_at;
};

/// `a b - t c - u d` (d defaults to object). Variables when `variables`.
std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items, std::size_t begin, bool variables,
                                        const std::string& what) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& e = items[i];
    if (e.is_atom(Token::Kind::Dash)) {
      if (i + 1 >= items.size()) fail(Kind::Syntax, "expected a type name after '-'", e);
      const SExpr& t = items[i + 1];
      if (t.is_list && t.head() == "either") fail(Kind::UnsupportedFeature, "'either' types are not supported", t);
      if (pending == 0) fail(Kind::Syntax, "'-' must follow at least one " + what, e);
      const std::string& type = name_of(t, "a type name");
      for (std::size_t k = out.size() - pending; k < out.size(); ++k) {
        out[k].type = type;
        out[k].type_at = &t;
      }
      pending = 0;
      ++i;
      continue;
    }
    if (variables) {
      if (!e.is_atom(Token::Kind::Variable)) fail(Kind::Syntax, "expected a variable (?name), found " + describe(e), e);
    } else if (!(e.is_atom(Token::Kind::Identifier) || e.is_atom(Token::Kind::Number))) {
      fail(Kind::Syntax, "expected " + what + ", found " + describe(e), e);
    }
    out.push_back({e.token.text, kRootType, &e, &e});
    ++pending;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared formula machinery

class Scope {
 public:
  void push(const Term& var) { vars_.push_back(var); }
  void pop(std::size_t n) { vars_.resize(vars_.size() - n); }
  const Term* find(const std::string& name) const {
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }
  std::size_t size() const { return vars_.size(); }

 private:
  std::vector<Term> vars_;
};

class FormulaParser {
 public:
  FormulaParser(const Domain& d, const std::map<std::string, Term>& constants) : d_(d), constants_(constants) {}

  void check_type(const std::string& type, const SExpr& at) const {
    if (!d_.types.contains(type)) fail(Kind::Declaration, "undeclared type '" + type + "'", at);
  }

  std::vector<Term> typed_variables(const SExpr& list) const {
    expect_list(list, "a parameter list");
    std::vector<Term> out;
    for (const auto& tn : parse_typed_list(list.items, 0, true, "variable")) {
      check_type(tn.type, *tn.type_at);
      for (const auto& prev : out)
        if (prev.name == tn.name) fail(Kind::Declaration, "variable " + tn.name + " declared twice", *tn.at);
      out.push_back(Term{tn.name, tn.type});
    }
    return out;
  }

  Term term(const SExpr& e, Scope& scope) const {
    if (e.is_atom(Token::Kind::Variable)) {
      const Term* v = scope.find(e.token.text);
      if (!v) fail(Kind::Declaration, "unbound variable " + e.token.text, e);
      return *v;
    }
    const std::string& name = name_of(e, "a term");
    auto it = constants_.find(name);
    if (it == constants_.end()) fail(Kind::Declaration, "undeclared object or constant '" + name + "'", e);
    return it->second;
  }

  Literal atom(const SExpr& e, Scope& scope, bool allow_derived = true) const {
    expect_list(e, "an atom");
    if (e.items.empty()) fail(Kind::Syntax, "expected an atom, found '()'", e);
    const std::string& pred = name_of(e.items[0], "a predicate name");
    const Predicate* p = d_.find_predicate(pred);
    if (!p) fail(Kind::Declaration, "undeclared predicate '" + pred + "'", e.items[0]);
    if (!allow_derived && p->is_derived) fail(Kind::Declaration, "derived predicate '" + pred + "' cannot appear here", e.items[0]);
    if (e.items.size() - 1 != p->arity())
      fail(Kind::Declaration,
           "predicate '" + pred + "' takes " + std::to_string(p->arity()) + " arguments, given " +
               std::to_string(e.items.size() - 1),
           e);
    Literal l{pred, {}, false};
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      Term t = term(e.items[i], scope);
      const std::string& want = p->param_types[i - 1];
      if (!d_.types.is_subtype(t.type, want))
        fail(Kind::Typing,
             "argument " + std::to_string(i) + " of '" + pred + "' must be of type '" + want + "', but " + t.name +
                 " has type '" + t.type + "'",
             e.items[i]);
      l.args.push_back(std::move(t));
    }
    return l;
  }

  Formula formula(const SExpr& e, Scope& scope) const {
    expect_list(e, "a formula");
    if (e.items.empty()) return Formula::truth();
    if (e.items[0].is_list) fail(Kind::Syntax, "expected a connective or predicate name", e.items[0]);
    const std::string& head = e.items[0].token.text;
    auto children = [&](std::size_t from) {
      std::vector<Formula> cs;
      for (std::size_t i = from; i < e.items.size(); ++i) cs.push_back(formula(e.items[i], scope));
      return cs;
    };
    if (head == "and") return Formula::conjunction(children(1));
    if (head == "or") return Formula::disjunction(children(1));
    if (head == "not") {
      if (e.items.size() != 2) fail(Kind::Syntax, "'not' takes exactly one formula", e);
      return negate(formula(e.items[1], scope));
    }
    if (head == "imply") {
      if (e.items.size() != 3) fail(Kind::Syntax, "'imply' takes exactly two formulas", e);
      Formula lhs = negate(formula(e.items[1], scope));
      return Formula::disjunction({std::move(lhs), formula(e.items[2], scope)});
    }
    if (head == "forall" || head == "exists") {
      if (e.items.size() != 3) fail(Kind::Syntax, "'" + head + "' takes a variable list and one formula", e);
      auto vars = typed_variables(e.items[1]);
      for (const auto& v : vars) scope.push(v);
      Formula body = formula(e.items[2], scope);
      scope.pop(vars.size());
      return head == "forall" ? Formula::forall(std::move(vars), std::move(body))
                              : Formula::exists(std::move(vars), std::move(body));
    }
    if (head == "=") {
      if (e.items.size() != 3) fail(Kind::Syntax, "'=' takes exactly two terms", e);
      return Formula::equal(term(e.items[1], scope), term(e.items[2], scope));
    }
    if (head == "when") fail(Kind::UnsupportedFeature, "conditional effects ('when') are not supported", e);
    return Formula::atom(atom(e, scope));
  }

  static Formula negate(Formula f) {
    if (f.kind() == Formula::Kind::Atom) return Formula::atom(f.literal().negation());
    return Formula::negation(std::move(f));
  }

 private:
  const Domain& d_;
  const std::map<std::string, Term>& constants_;
};

// ---------------------------------------------------------------------------
// Effects

struct WeightedEffect {
  Probability probability;
  DeterministicEffect effect;
};

class EffectParser {
 public:
  EffectParser(const FormulaParser& fp) : fp_(fp) {}

  Effect parse(const SExpr& e, Scope& scope) {
    saw_probabilistic_ = false;
    auto dist = distribution(e, scope);
    if (!saw_probabilistic_) return Effect::deterministic(std::move(dist.front().effect));
    std::vector<Outcome> outcomes;
    for (auto& w : dist) {
      // Empty outcomes fold into the implicit no-op outcome.
      if (w.effect.empty() || w.probability == Probability::zero()) continue;
      outcomes.push_back({w.probability, std::move(w.effect)});
    }
    try {
      return Effect::probabilistic(std::move(outcomes));
    } catch (const ModelError& err) {
      fail(Kind::Declaration, err.what(), e);
    }
  }

 private:
  static void merge_into(DeterministicEffect& into, const DeterministicEffect& from) {
    into.add.insert(from.add.begin(), from.add.end());
    into.del.insert(from.del.begin(), from.del.end());
  }

  std::vector<WeightedEffect> distribution(const SExpr& e, Scope& scope) {
    expect_list(e, "an effect");
    if (e.items.empty()) return {{Probability::one(), {}}};
    if (e.items[0].is_list) fail(Kind::Syntax, "expected an effect keyword or predicate name", e.items[0]);
    const std::string& head = e.items[0].token.text;
    if (head == "and") {
      std::vector<WeightedEffect> acc{{Probability::one(), {}}};
      for (std::size_t i = 1; i < e.items.size(); ++i) {
        auto part = distribution(e.items[i], scope);
        std::vector<WeightedEffect> next;
        next.reserve(acc.size() * part.size());
        for (const auto& a : acc) {
          for (const auto& b : part) {
            WeightedEffect w{a.probability * b.probability, a.effect};
            merge_into(w.effect, b.effect);
            next.push_back(std::move(w));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    if (head == "not") {
      if (e.items.size() != 2) fail(Kind::Syntax, "'not' takes exactly one atom", e);
      const SExpr& inner = expect_list(e.items[1], "an atom");
      if (inner.head() == "=") fail(Kind::Syntax, "equality cannot be an effect", inner);
      DeterministicEffect d;
      d.del.insert(fp_.atom(inner, scope, false));
      return {{Probability::one(), std::move(d)}};
    }
    if (head == "probabilistic") {
      saw_probabilistic_ = true;
      if (e.items.size() % 2 == 0) fail(Kind::Syntax, "'probabilistic' expects probability/effect pairs", e);
      std::vector<WeightedEffect> out;
      Probability total;
      for (std::size_t i = 1; i < e.items.size(); i += 2) {
        const SExpr& p = e.items[i];
        if (!p.is_atom(Token::Kind::Number)) fail(Kind::Syntax, "expected a probability, found " + describe(p), p);
        auto prob = Probability::parse(p.token.text);
        if (!prob) fail(Kind::Syntax, "invalid probability '" + p.token.text + "'", p);
        if (*prob > Probability::one()) fail(Kind::Declaration, "probability " + p.token.text + " exceeds 1", p);
        total = total + *prob;
        for (auto& w : distribution(e.items[i + 1], scope)) out.push_back({*prob * w.probability, std::move(w.effect)});
      }
      if (total.value() > 1.0 + Effect::kSumTolerance)
        fail(Kind::Declaration, "probabilities sum to " + total.to_string() + ", more than 1", e);
      if (total < Probability::one()) out.push_back({Probability::one() - total, {}});
      return out;
    }
    if (head == "when") fail(Kind::UnsupportedFeature, "conditional effects ('when') are not supported", e);
    if (head == "forall") fail(Kind::UnsupportedFeature, "universal effects ('forall' in effects) are not supported", e);
    if (head == "increase" || head == "decrease" || head == "assign" || head == "scale-up" || head == "scale-down")
      fail(Kind::UnsupportedFeature, "numeric effects ('" + head + "') are not supported", e);
    if (head == "=") fail(Kind::Syntax, "equality cannot be an effect", e);
    DeterministicEffect d;
    d.add.insert(fp_.atom(e, scope, false));
    return {{Probability::one(), std::move(d)}};
  }

  const FormulaParser& fp_;
  bool saw_probabilistic_ = false;
};

void flatten_conjuncts(const Formula& f, std::vector<const Formula*>& out) {
  if (f.kind() == Formula::Kind::And) {
    for (const auto& c : f.children()) flatten_conjuncts(c, out);
  } else {
    out.push_back(&f);
  }
}

std::optional<std::string> find_action_predicate(const Operator& op, const Domain& d) {
  std::vector<const Formula*> conjuncts;
  flatten_conjuncts(op.precondition, conjuncts);
  std::optional<std::string> found;
  for (const Formula* c : conjuncts) {
    if (c->kind() != Formula::Kind::Atom || c->literal().negated) continue;
    const Predicate* p = d.find_predicate(c->literal().predicate);
    if (!p || !p->is_action_predicate) continue;
    if (found) return std::nullopt;
    found = p->name;
  }
  return found;
}

const SExpr& expect_define(const SExpr& root, const std::string& what) {
  if (root.items.empty() || root.head() != "define")
    fail(Kind::Syntax, "expected '(define (" + what + " <name>) ...)'", root);
  if (root.items.size() < 2 || !root.items[1].is_list || root.items[1].head() != what ||
      root.items[1].items.size() != 2)
    fail(Kind::Syntax, "expected '(" + what + " <name>)' after define",
         root.items.size() > 1 ? root.items[1] : root);
  return root.items[1].items[1];
}

std::set<std::string> parse_requirements(const SExpr& section) {
  std::set<std::string> out;
  for (std::size_t i = 1; i < section.items.size(); ++i) {
    const SExpr& r = section.items[i];
    if (!r.is_atom(Token::Kind::Keyword)) fail(Kind::Syntax, "expected a requirement flag, found " + describe(r), r);
    if (r.token.text == ":action-costs" || r.token.text == ":numeric-fluents" || r.token.text == ":fluents" ||
        r.token.text == ":durative-actions")
      fail(Kind::UnsupportedFeature, "requirement " + r.token.text + " is not supported", r);
    out.insert(r.token.text);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Domain

class DomainParser {
 public:
  explicit DomainParser(std::string_view file) : file_(file) {}

  Domain parse(std::string_view text) {
    Reader reader(tokenize(text, file_));
    SExpr root = reader.read_document(file_);
    d_.name = name_of(expect_define(root, "domain"), "a domain name");

    const SExpr *requirements = nullptr, *types = nullptr, *constants = nullptr, *predicates = nullptr;
    std::vector<const SExpr*> action_decls, actions, derived;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& s = root.items[i];
      if (!s.is_list || s.items.empty() || !s.items[0].is_atom(Token::Kind::Keyword))
        fail(Kind::Syntax, "expected a domain section such as '(:predicates ...)', found " + describe(s), s);
      const std::string& kw = s.items[0].token.text;
      auto once = [&](const SExpr*& slot) {
        if (slot) fail(Kind::Syntax, "duplicate " + kw + " section", s);
        slot = &s;
      };
      if (kw == ":requirements") once(requirements);
      else if (kw == ":types") once(types);
      else if (kw == ":constants") once(constants);
      else if (kw == ":predicates") once(predicates);
      else if (kw == ":actions") action_decls.push_back(&s);
      else if (kw == ":action") actions.push_back(&s);
      else if (kw == ":derived") derived.push_back(&s);
      else if (kw == ":functions" || kw == ":durative-action" || kw == ":constraints")
        fail(Kind::UnsupportedFeature, "section " + kw + " is not supported", s);
      else
        fail(Kind::Syntax, "unknown domain section " + kw, s);
    }

    if (requirements) d_.requirements = parse_requirements(*requirements);
    if (types) parse_types(*types);
    if (constants) parse_constants(*constants);
    if (predicates) parse_predicates(*predicates);
    for (const SExpr* s : action_decls) parse_action_decl(*s);
    for (const SExpr* s : derived) declare_derived_head(*s);
    FormulaParser fp(d_, constants_);
    for (const SExpr* s : derived) parse_derived(*s, fp);
    for (const SExpr* s : actions) parse_action(*s, fp);

    try {
      inference::stratify(d_);
    } catch (const ModelError& err) {
      fail(Kind::Declaration, err.what(), derived.empty() ? root : *derived.front());
    }
    return std::move(d_);
  }

 private:
  void parse_types(const SExpr& s) {
    TypeHierarchy::ParentMap parents;
    for (const auto& tn : parse_typed_list(s.items, 1, false, "type name")) {
      if (tn.name == kRootType) {
        if (tn.type_at != tn.at) fail(Kind::Declaration, "type 'object' cannot have a parent", *tn.at);
        continue;
      }
      auto [it, inserted] = parents.emplace(tn.name, tn.type);
      if (!inserted && it->second != tn.type)
        fail(Kind::Declaration, "type '" + tn.name + "' declared with two parents", *tn.at);
    }
    // Parents that are never listed themselves are implicitly subtypes of object.
    std::vector<std::string> implicit;
    for (const auto& [name, parent] : parents)
      if (parent && *parent != kRootType && !parents.count(*parent)) implicit.push_back(*parent);
    for (const auto& name : implicit) parents.emplace(name, kRootType);
    try {
      d_.types = TypeHierarchy(std::move(parents));
    } catch (const ModelError& err) {
      fail(Kind::Declaration, err.what(), s);
    }
  }

  void check_type(const std::string& type, const SExpr& at) const {
    if (!d_.types.contains(type)) fail(Kind::Declaration, "undeclared type '" + type + "'", at);
  }

  void parse_constants(const SExpr& s) {
    for (const auto& tn : parse_typed_list(s.items, 1, false, "constant name")) {
      check_type(tn.type, *tn.type_at);
      if (constants_.count(tn.name)) fail(Kind::Declaration, "constant '" + tn.name + "' declared twice", *tn.at);
      Term t{tn.name, tn.type};
      constants_.emplace(tn.name, t);
      d_.constants.push_back(t);
    }
  }

  Predicate predicate_signature(const SExpr& e) const {
    expect_list(e, "a predicate declaration");
    if (e.items.empty()) fail(Kind::Syntax, "empty predicate declaration", e);
    Predicate p;
    p.name = name_of(e.items[0], "a predicate name");
    if (p.name == "=") fail(Kind::Declaration, "'=' is reserved for equality", e.items[0]);
    std::set<std::string> seen;
    for (const auto& tn : parse_typed_list(e.items, 1, true, "variable")) {
      check_type(tn.type, *tn.type_at);
      if (!seen.insert(tn.name).second) fail(Kind::Declaration, "variable " + tn.name + " declared twice", *tn.at);
      p.param_types.push_back(tn.type);
    }
    return p;
  }

  void parse_predicates(const SExpr& s) {
    for (std::size_t i = 1; i < s.items.size(); ++i) {
      Predicate p = predicate_signature(s.items[i]);
      if (d_.find_predicate(p.name)) fail(Kind::Declaration, "predicate '" + p.name + "' declared twice", s.items[i]);
      d_.predicates.push_back(std::move(p));
    }
  }

  Predicate* mutable_predicate(const std::string& name) {
    for (auto& p : d_.predicates)
      if (p.name == name) return &p;
    return nullptr;
  }

  void parse_action_decl(const SExpr& s) {
    for (std::size_t i = 1; i < s.items.size(); ++i) {
      const std::string& name = name_of(s.items[i], "an action predicate name");
      Predicate* p = mutable_predicate(name);
      if (!p) fail(Kind::Declaration, "action predicate '" + name + "' is not declared in :predicates", s.items[i]);
      p->is_action_predicate = true;
    }
  }

  void declare_derived_head(const SExpr& s) {
    if (s.items.size() != 3) fail(Kind::Syntax, "expected '(:derived (<head> ?x ...) <formula>)'", s);
    const SExpr& head = expect_list(s.items[1], "a derived predicate head");
    if (head.items.empty()) fail(Kind::Syntax, "empty derived predicate head", head);
    Predicate sig = predicate_signature(head);
    Predicate* p = mutable_predicate(sig.name);
    if (!p) {
      sig.is_derived = true;
      d_.predicates.push_back(std::move(sig));
      return;
    }
    if (p->is_action_predicate) fail(Kind::Declaration, "action predicate '" + p->name + "' cannot be derived", head);
    if (p->arity() != sig.arity())
      fail(Kind::Declaration, "derived head '" + sig.name + "' does not match its declared arity", head);
    p->is_derived = true;
  }

  void parse_derived(const SExpr& s, const FormulaParser& fp) {
    const SExpr& head = s.items[1];
    const Predicate* p = d_.find_predicate(head.items[0].token.text);
    // Untyped head variables take the declared parameter types.
    auto typed = parse_typed_list(head.items, 1, true, "variable");
    DerivedRule rule;
    rule.head.predicate = p->name;
    Scope scope;
    for (std::size_t i = 0; i < typed.size(); ++i) {
      bool explicit_type = typed[i].type_at != typed[i].at;
      std::string type = explicit_type ? typed[i].type : p->param_types[i];
      if (!d_.types.is_subtype(type, p->param_types[i]))
        fail(Kind::Typing, "derived head variable " + typed[i].name + " has type '" + type + "', expected '" +
                               p->param_types[i] + "'", *typed[i].at);
      Term v{typed[i].name, type};
      rule.head.args.push_back(v);
      scope.push(v);
    }
    rule.body = fp.formula(s.items[2], scope);
    d_.derived.push_back(std::move(rule));
  }

  void parse_action(const SExpr& s, const FormulaParser& fp) {
    if (s.items.size() < 2) fail(Kind::Syntax, "expected an action name after :action", s);
    Operator op;
    op.name = name_of(s.items[1], "an action name");
    if (d_.find_operator(op.name)) fail(Kind::Declaration, "action '" + op.name + "' defined twice", s.items[1]);
    const SExpr *params = nullptr, *pre = nullptr, *eff = nullptr;
    for (std::size_t i = 2; i < s.items.size(); i += 2) {
      const SExpr& key = s.items[i];
      if (!key.is_atom(Token::Kind::Keyword)) fail(Kind::Syntax, "expected :parameters, :precondition or :effect", key);
      if (i + 1 >= s.items.size()) fail(Kind::Syntax, "missing value after " + key.token.text, key);
      const SExpr* value = &s.items[i + 1];
      if (key.token.text == ":parameters") params = value;
      else if (key.token.text == ":precondition") pre = value;
      else if (key.token.text == ":effect") eff = value;
      else fail(Kind::Syntax, "unknown action key " + key.token.text, key);
    }
    Scope scope;
    if (params) op.parameters = fp.typed_variables(*params);
    for (const auto& v : op.parameters) scope.push(v);
    if (pre) op.precondition = fp.formula(*pre, scope);
    if (eff) op.effect = EffectParser(fp).parse(*eff, scope);
    op.action_predicate = find_action_predicate(op, d_);
    d_.operators.push_back(std::move(op));
  }

  std::string file_;
  Domain d_;
  std::map<std::string, Term> constants_;
};

// ---------------------------------------------------------------------------
// Problem

class ProblemParser {
 public:
  ProblemParser(const Domain& d, std::string_view file) : d_(d), file_(file) {
    for (const auto& c : d.constants) names_.emplace(c.name, c);
  }

  Problem parse(std::string_view text) {
    Reader reader(tokenize(text, file_));
    SExpr root = reader.read_document(file_);
    p_.name = name_of(expect_define(root, "problem"), "a problem name");

    const SExpr *domain = nullptr, *objects = nullptr, *init = nullptr, *goal = nullptr;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& s = root.items[i];
      if (!s.is_list || s.items.empty() || !s.items[0].is_atom(Token::Kind::Keyword))
        fail(Kind::Syntax, "expected a problem section such as '(:init ...)', found " + describe(s), s);
      const std::string& kw = s.items[0].token.text;
      auto once = [&](const SExpr*& slot) {
        if (slot) fail(Kind::Syntax, "duplicate " + kw + " section", s);
        slot = &s;
      };
      if (kw == ":domain") once(domain);
      else if (kw == ":objects") once(objects);
      else if (kw == ":init") once(init);
      else if (kw == ":goal") once(goal);
      else if (kw == ":requirements") parse_requirements(s);
      else if (kw == ":metric" || kw == ":constraints")
        fail(Kind::UnsupportedFeature, "section " + kw + " is not supported", s);
      else
        fail(Kind::Syntax, "unknown problem section " + kw, s);
    }
    if (!domain) fail(Kind::Syntax, "missing (:domain <name>) section", root);
    if (domain->items.size() != 2) fail(Kind::Syntax, "expected '(:domain <name>)'", *domain);
    p_.domain_name = name_of(domain->items[1], "a domain name");
    if (p_.domain_name != d_.name)
      fail(Kind::Declaration, "problem is for domain '" + p_.domain_name + "' but the domain is '" + d_.name + "'",
           domain->items[1]);
    if (objects) parse_objects(*objects);
    if (init) parse_init(*init);
    if (!goal) fail(Kind::Syntax, "missing (:goal ...) section", root);
    if (goal->items.size() != 2) fail(Kind::Syntax, "expected exactly one goal formula", *goal);
    Scope scope;
    p_.goal = FormulaParser(d_, names_).formula(goal->items[1], scope);
    return std::move(p_);
  }

 private:
  void parse_objects(const SExpr& s) {
    for (const auto& tn : parse_typed_list(s.items, 1, false, "object name")) {
      if (!d_.types.contains(tn.type)) fail(Kind::Declaration, "undeclared type '" + tn.type + "'", *tn.type_at);
      Term t{tn.name, tn.type};
      auto it = names_.find(tn.name);
      if (it != names_.end()) {
        bool is_constant = d_.find_constant(tn.name) != nullptr;
        if (is_constant && it->second.type == tn.type) continue;
        fail(Kind::Declaration, "object '" + tn.name + "' declared twice", *tn.at);
      }
      names_.emplace(tn.name, t);
      p_.objects.push_back(std::move(t));
    }
  }

  void parse_init(const SExpr& s) {
    FormulaParser fp(d_, names_);
    Scope scope;
    for (std::size_t i = 1; i < s.items.size(); ++i) {
      const SExpr& e = expect_list(s.items[i], "an initial atom");
      std::string head = e.head();
      if (head == "not") fail(Kind::Syntax, "negative literals are not allowed in :init (closed world)", e);
      if (head == "=") fail(Kind::UnsupportedFeature, "equality and numeric facts in :init are not supported", e);
      Literal l = fp.atom(e, scope);
      const Predicate* p = d_.find_predicate(l.predicate);
      if (p->is_derived) fail(Kind::Declaration, "derived predicate '" + p->name + "' cannot appear in :init", e);
      p_.init.insert(std::move(l));
    }
  }

  const Domain& d_;
  std::string file_;
  Problem p_;
  std::map<std::string, Term> names_;
};

}  // namespace

Domain parse_domain(std::string_view text, std::string_view file) { return DomainParser(file).parse(text); }

Problem parse_problem(std::string_view text, const Domain& domain, std::string_view file) {
  return ProblemParser(domain, file).parse(text);
}

}  // namespace pddlenv::pddl
