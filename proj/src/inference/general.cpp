// General evaluator: continuation-passing backtracking over the compiled
// formula tree. Each node either generates bindings (atoms, equalities,
// disjunctions and existentials with unbound variables) or acts as a filter
// once its free slots are bound. Slots nobody constrains stay unbound and
// mean "any object of the slot's type".

#include <array>
#include <limits>
#include <utility>

#include "node.hpp"

namespace pddlenv::inference::detail {

namespace {

class GeneralSolver {
 public:
  GeneralSolver(const Model& m, const CompiledQuery& q)
      : m_(m), q_(q), bind_(q.slot_count(), -1), universe_size_(m.universe().size()) {}

  void run(bool stop_at_first, std::vector<Row>& out) {
    Row row(q_.free_count());
    auto emit = [&] { return emit_rows(0, row, out, stop_at_first); };
    solve(q_.root(), emit);
  }

 private:
  bool emit_rows(std::size_t i, Row& row, std::vector<Row>& out, bool stop) {
    if (i == row.size()) {
      out.push_back(row);
      return stop;
    }
    if (bind_[i] >= 0) {
      row[i] = bind_[i];
      return emit_rows(i + 1, row, out, stop);
    }
    for (int o : q_.slot_domain(i)) {
      row[i] = o;
      if (emit_rows(i + 1, row, out, stop)) return true;
    }
    return false;
  }

  int value(const Arg& a) const { return a.slot >= 0 ? bind_[static_cast<std::size_t>(a.slot)] : a.object; }

  bool bound(const Node& n) const {
    for (int s : n.free_slots)
      if (bind_[static_cast<std::size_t>(s)] < 0) return false;
    return true;
  }

  bool admits(int slot, int object) const {
    return object >= 0 && static_cast<std::size_t>(object) < universe_size_ &&
           q_.slot_flags(static_cast<std::size_t>(slot))[static_cast<std::size_t>(object)];
  }

  bool exists(const Node& n) {
    return solve(n, [] { return true; });
  }

  bool solve(const Node& n, Continuation k) {
    switch (n.kind) {
      case Node::Kind::True:
        return k();
      case Node::Kind::False:
        return false;
      case Node::Kind::Atom:
        return solve_atom(n, k);
      case Node::Kind::NegAtom:
        return enumerate(n.free_slots, 0, [&] { return holds_atom(n) ? false : k(); });
      case Node::Kind::Equal:
        return solve_equal(n, k);
      case Node::Kind::And: {
        std::vector<char> done(n.children.size(), 0);
        return solve_and(n, done, n.children.size(), k);
      }
      case Node::Kind::Or:
        if (bound(n)) {
          for (const auto& c : n.children)
            if (exists(c)) return k();
          return false;
        }
        for (const auto& c : n.children)
          if (solve(c, k)) return true;
        return false;
      case Node::Kind::Exists: {
        auto witnesses_ok = [&] {
          for (int s : n.quantified)
            if (bind_[static_cast<std::size_t>(s)] < 0 && q_.slot_domain(static_cast<std::size_t>(s)).empty())
              return false;
          return true;
        };
        if (bound(n)) {
          bool found = solve(n.children.front(), [&] { return witnesses_ok(); });
          return found ? k() : false;
        }
        return solve(n.children.front(), [&] { return witnesses_ok() ? k() : false; });
      }
      case Node::Kind::Not:
        return enumerate(n.free_slots, 0, [&] { return exists(n.children.front()) ? false : k(); });
    }
    return false;
  }

  bool holds_atom(const Node& n) const {
    const auto& t = m_.table(n.predicate);
    if (n.args.empty()) return t.nullary;
    std::array<int, kMaxArity> vals{};
    for (std::size_t i = 0; i < n.args.size(); ++i) vals[i] = value(n.args[i]);
    return t.contains(vals.data());
  }

  bool solve_atom(const Node& n, Continuation k) {
    const auto& t = m_.table(n.predicate);
    const std::size_t arity = n.args.size();
    if (arity == 0) return t.nullary ? k() : false;

    std::array<int, kMaxArity> vals{};
    bool ground = true;
    for (std::size_t i = 0; i < arity; ++i) {
      vals[i] = value(n.args[i]);
      if (vals[i] < 0) ground = false;
    }
    if (ground) return t.contains(vals.data()) ? k() : false;

    auto try_row = [&](const int* row) {
      std::array<int, kMaxArity> fresh{};
      std::size_t nfresh = 0;
      bool ok = true;
      for (std::size_t i = 0; i < arity && ok; ++i) {
        const Arg& a = n.args[i];
        int v = row[i];
        if (a.slot < 0) {
          ok = a.object == v;
          continue;
        }
        auto s = static_cast<std::size_t>(a.slot);
        if (bind_[s] >= 0) {
          ok = bind_[s] == v;
        } else if (admits(a.slot, v)) {
          bind_[s] = v;
          fresh[nfresh++] = a.slot;
        } else {
          ok = false;
        }
      }
      bool stop = ok && k();
      for (std::size_t j = 0; j < nfresh; ++j) bind_[static_cast<std::size_t>(fresh[j])] = -1;
      return stop;
    };

    if (vals[0] >= 0) {
      auto first = static_cast<std::size_t>(vals[0]);
      if (first >= t.by_first.size()) return false;
      for (std::size_t r : t.by_first[first])
        if (try_row(&t.rows[r * arity])) return true;
      return false;
    }
    for (std::size_t r = 0; r < t.row_count(); ++r)
      if (try_row(&t.rows[r * arity])) return true;
    return false;
  }

  bool bind_and_continue(int slot, int object, Continuation k) {
    if (!admits(slot, object)) return false;
    auto s = static_cast<std::size_t>(slot);
    bind_[s] = object;
    bool stop = k();
    bind_[s] = -1;
    return stop;
  }

  bool solve_equal(const Node& n, Continuation k) {
    const Arg& l = n.args[0];
    const Arg& r = n.args[1];
    int a = value(l), b = value(r);
    if (a >= 0 && b >= 0) return a == b ? k() : false;
    if (l.slot >= 0 && l.slot == r.slot) return k();
    if (a < 0 && b >= 0) return bind_and_continue(l.slot, b, k);
    if (b < 0 && a >= 0) return bind_and_continue(r.slot, a, k);
    auto s = static_cast<std::size_t>(l.slot);
    for (int o : q_.slot_domain(s)) {
      bind_[s] = o;
      bool stop = bind_and_continue(r.slot, o, k);
      bind_[s] = -1;
      if (stop) return true;
    }
    return false;
  }

  bool enumerate(const std::vector<int>& slots, std::size_t i, Continuation k) {
    while (i < slots.size() && bind_[static_cast<std::size_t>(slots[i])] >= 0) ++i;
    if (i == slots.size()) return k();
    auto s = static_cast<std::size_t>(slots[i]);
    for (int o : q_.slot_domain(s)) {
      bind_[s] = o;
      bool stop = enumerate(slots, i + 1, k);
      if (stop) {
        bind_[s] = -1;
        return true;
      }
    }
    bind_[s] = -1;
    return false;
  }

  // Cheapest next conjunct: ready filters, then generators by estimated
  // fan-out, then nested disjunctions/quantifiers, then filters that must
  // enumerate their variables.
  std::pair<int, std::size_t> score(const Node& c) const {
    if (bound(c)) return {0, 0};
    switch (c.kind) {
      case Node::Kind::Atom: {
        const auto& t = m_.table(c.predicate);
        int first = value(c.args[0]);
        if (first >= 0)
          return {1, static_cast<std::size_t>(first) < t.by_first.size() ? t.by_first[static_cast<std::size_t>(first)].size() : 0};
        return {1, t.row_count()};
      }
      case Node::Kind::Equal:
        if (value(c.args[0]) >= 0 || value(c.args[1]) >= 0) return {1, 1};
        return {3, q_.slot_domain(static_cast<std::size_t>(c.args[0].slot)).size()};
      case Node::Kind::Or:
      case Node::Kind::Exists:
      case Node::Kind::And:
        return {2, 0};
      default: {
        std::size_t product = 1;
        for (int s : c.free_slots) {
          if (bind_[static_cast<std::size_t>(s)] >= 0) continue;
          std::size_t size = q_.slot_domain(static_cast<std::size_t>(s)).size();
          product = product > std::numeric_limits<std::size_t>::max() / (size + 1) ? std::numeric_limits<std::size_t>::max()
                                                                                  : product * size;
        }
        return {3, product};
      }
    }
  }

  bool solve_and(const Node& n, std::vector<char>& done, std::size_t left, Continuation k) {
    if (left == 0) return k();
    std::size_t best = 0;
    std::pair<int, std::size_t> best_score{std::numeric_limits<int>::max(), 0};
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (done[i]) continue;
      auto sc = score(n.children[i]);
      if (sc < best_score) {
        best_score = sc;
        best = i;
      }
    }
    done[best] = 1;
    bool stop = solve(n.children[best], [&] { return solve_and(n, done, left - 1, k); });
    done[best] = 0;
    return stop;
  }

  const Model& m_;
  const CompiledQuery& q_;
  std::vector<int> bind_;
  std::size_t universe_size_;
};

}  // namespace

void solve_general(const Model& m, const CompiledQuery& q, bool stop_at_first, std::vector<Row>& out) {
  GeneralSolver(m, q).run(stop_at_first, out);
}

}  // namespace pddlenv::inference::detail
