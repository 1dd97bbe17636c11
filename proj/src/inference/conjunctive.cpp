// Fast path for conjunctions of literals and equalities: a join plan is
// fixed up front (most-bound positive literal first, filters as soon as
// their variables are bound), then executed by plain backtracking with
// first-argument indexing.

#include <array>
#include <limits>
#include <tuple>

#include "node.hpp"

namespace pddlenv::inference::detail {

namespace {

struct Step {
  enum class Kind { Match, Check, BindEqual, Enumerate };
  Kind kind;
  const Node* node = nullptr;
  int slot = -1;
};

void flatten(const Node& n, std::vector<const Node*>& out) {
  if (n.kind == Node::Kind::And) {
    for (const auto& c : n.children) flatten(c, out);
  } else if (n.kind != Node::Kind::True) {
    out.push_back(&n);
  }
}

class ConjunctiveSolver {
 public:
  ConjunctiveSolver(const Model& m, const CompiledQuery& q)
      : m_(m), q_(q), bind_(q.slot_count(), -1), universe_size_(m.universe().size()) {}

  void run(bool stop_at_first, std::vector<Row>& out) {
    std::vector<const Node*> literals;
    flatten(q_.root(), literals);
    for (const Node* n : literals)
      if (n->kind == Node::Kind::False) return;
    plan(literals);
    out_ = &out;
    stop_at_first_ = stop_at_first;
    row_.assign(q_.free_count(), -1);
    execute(0);
  }

 private:
  void plan(std::vector<const Node*> literals) {
    std::vector<char> planned(q_.slot_count(), 0);
    auto is_known = [&](const Arg& a) { return a.slot < 0 || planned[static_cast<std::size_t>(a.slot)]; };
    std::vector<const Node*> positives, filters;
    for (const Node* n : literals) (n->kind == Node::Kind::Atom ? positives : filters).push_back(n);

    while (true) {
      bool progress = true;
      while (progress) {
        progress = false;
        for (auto it = filters.begin(); it != filters.end();) {
          const Node* f = *it;
          std::size_t unknown = 0;
          int unknown_slot = -1;
          for (const auto& a : f->args) {
            if (!is_known(a)) {
              ++unknown;
              unknown_slot = a.slot;
            }
          }
          if (unknown == 0) {
            steps_.push_back({Step::Kind::Check, f});
          } else if (f->kind == Node::Kind::Equal && unknown == 1 && f->args[0].slot != f->args[1].slot) {
            steps_.push_back({Step::Kind::BindEqual, f, unknown_slot});
            planned[static_cast<std::size_t>(unknown_slot)] = 1;
          } else {
            ++it;
            continue;
          }
          it = filters.erase(it);
          progress = true;
        }
      }

      if (!positives.empty()) {
        std::size_t best = 0;
        std::tuple<std::size_t, bool, std::size_t> best_key{0, false, std::numeric_limits<std::size_t>::max()};
        bool have = false;
        for (std::size_t i = 0; i < positives.size(); ++i) {
          const Node* p = positives[i];
          std::size_t known = 0;
          for (const auto& a : p->args) known += is_known(a) ? 1 : 0;
          bool first_known = !p->args.empty() && is_known(p->args[0]);
          std::size_t size = m_.table(p->predicate).row_count();
          // more bound arguments, then an indexable first argument, then a smaller table
          bool better = !have || known > std::get<0>(best_key) ||
                        (known == std::get<0>(best_key) && first_known && !std::get<1>(best_key)) ||
                        (known == std::get<0>(best_key) && first_known == std::get<1>(best_key) &&
                         size < std::get<2>(best_key));
          if (better) {
            best = i;
            best_key = {known, first_known, size};
            have = true;
          }
        }
        const Node* p = positives[best];
        positives.erase(positives.begin() + static_cast<std::ptrdiff_t>(best));
        steps_.push_back({Step::Kind::Match, p});
        for (const auto& a : p->args)
          if (a.slot >= 0) planned[static_cast<std::size_t>(a.slot)] = 1;
        continue;
      }

      if (!filters.empty()) {
        const Node* f = filters.front();
        for (const auto& a : f->args) {
          if (!is_known(a)) {
            steps_.push_back({Step::Kind::Enumerate, nullptr, a.slot});
            planned[static_cast<std::size_t>(a.slot)] = 1;
          }
        }
        continue;
      }
      break;
    }
  }

  int value(const Arg& a) const { return a.slot >= 0 ? bind_[static_cast<std::size_t>(a.slot)] : a.object; }

  bool admits(int slot, int object) const {
    return object >= 0 && static_cast<std::size_t>(object) < universe_size_ &&
           q_.slot_flags(static_cast<std::size_t>(slot))[static_cast<std::size_t>(object)];
  }

  bool contains(const Node& n) const {
    const auto& t = m_.table(n.predicate);
    if (n.args.empty()) return t.nullary;
    std::array<int, kMaxArity> vals{};
    for (std::size_t i = 0; i < n.args.size(); ++i) vals[i] = value(n.args[i]);
    return t.contains(vals.data());
  }

  // Returns true to stop.
  bool execute(std::size_t i) {
    if (i == steps_.size()) return emit(0);
    const Step& step = steps_[i];
    switch (step.kind) {
      case Step::Kind::Check: {
        const Node& n = *step.node;
        bool pass = false;
        if (n.kind == Node::Kind::Atom) pass = contains(n);
        else if (n.kind == Node::Kind::NegAtom) pass = !contains(n);
        else pass = value(n.args[0]) == value(n.args[1]);
        return pass && execute(i + 1);
      }
      case Step::Kind::BindEqual: {
        const Node& n = *step.node;
        int other = n.args[0].slot == step.slot ? value(n.args[1]) : value(n.args[0]);
        if (!admits(step.slot, other)) return false;
        auto s = static_cast<std::size_t>(step.slot);
        bind_[s] = other;
        bool stop = execute(i + 1);
        bind_[s] = -1;
        return stop;
      }
      case Step::Kind::Enumerate: {
        auto s = static_cast<std::size_t>(step.slot);
        for (int o : q_.slot_domain(s)) {
          bind_[s] = o;
          if (execute(i + 1)) {
            bind_[s] = -1;
            return true;
          }
        }
        bind_[s] = -1;
        return false;
      }
      case Step::Kind::Match:
        return match(*step.node, i);
    }
    return false;
  }

  bool match(const Node& n, std::size_t i) {
    const auto& t = m_.table(n.predicate);
    const std::size_t arity = n.args.size();
    if (arity == 0) return t.nullary && execute(i + 1);

    auto try_row = [&](const int* row) {
      std::array<int, kMaxArity> fresh{};
      std::size_t nfresh = 0;
      bool ok = true;
      for (std::size_t a = 0; a < arity && ok; ++a) {
        const Arg& arg = n.args[a];
        if (arg.slot < 0) {
          ok = arg.object == row[a];
          continue;
        }
        auto s = static_cast<std::size_t>(arg.slot);
        if (bind_[s] >= 0) {
          ok = bind_[s] == row[a];
        } else if (admits(arg.slot, row[a])) {
          bind_[s] = row[a];
          fresh[nfresh++] = arg.slot;
        } else {
          ok = false;
        }
      }
      bool stop = ok && execute(i + 1);
      for (std::size_t j = 0; j < nfresh; ++j) bind_[static_cast<std::size_t>(fresh[j])] = -1;
      return stop;
    };

    int first = value(n.args[0]);
    if (first >= 0) {
      auto f = static_cast<std::size_t>(first);
      if (f >= t.by_first.size()) return false;
      for (std::size_t r : t.by_first[f])
        if (try_row(&t.rows[r * arity])) return true;
      return false;
    }
    for (std::size_t r = 0; r < t.row_count(); ++r)
      if (try_row(&t.rows[r * arity])) return true;
    return false;
  }

  bool emit(std::size_t v) {
    if (v == row_.size()) {
      out_->push_back(row_);
      return stop_at_first_;
    }
    if (bind_[v] >= 0) {
      row_[v] = bind_[v];
      return emit(v + 1);
    }
    for (int o : q_.slot_domain(v)) {
      row_[v] = o;
      if (emit(v + 1)) return true;
    }
    return false;
  }

  const Model& m_;
  const CompiledQuery& q_;
  std::vector<int> bind_;
  std::size_t universe_size_;
  std::vector<Step> steps_;
  std::vector<Row>* out_ = nullptr;
  bool stop_at_first_ = false;
  Row row_;
};

}  // namespace

void solve_conjunctive(const Model& m, const CompiledQuery& q, bool stop_at_first, std::vector<Row>& out) {
  ConjunctiveSolver(m, q).run(stop_at_first, out);
}

}  // namespace pddlenv::inference::detail
