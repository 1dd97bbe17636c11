#ifndef PDDLENV_INFERENCE_NODE_HPP
#define PDDLENV_INFERENCE_NODE_HPP

#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

#include "pddlenv/inference.hpp"

namespace pddlenv::inference {

inline constexpr std::size_t kMaxArity = 32;

/// A slot (variable) or a fixed object id. Constants that are not objects
/// of the universe get ids at or beyond Universe::size(); they never occur
/// in a table and never enter a slot.
struct Arg {
  int slot = -1;
  int object = -1;
};

/// Compiled formula. ForAll is lowered to Not(Exists(Not ...)) and a Not
/// directly over an atom becomes NegAtom.
struct Node {
  enum class Kind { True, False, Atom, NegAtom, Equal, And, Or, Not, Exists };

  Kind kind = Kind::True;
  int predicate = -1;
  std::vector<Arg> args;
  std::vector<Node> children;
  std::vector<int> quantified;  // Exists only
  std::vector<int> free_slots;  // slots this node reads but does not quantify
};

namespace detail {

/// Non-owning callable reference; the referenced callable must outlive it.
template <class Sig>
class FunctionRef;

template <class R, class... A>
class FunctionRef<R(A...)> {
 public:
  template <class F>
    requires(!std::is_same_v<std::remove_cvref_t<F>, FunctionRef>)
  FunctionRef(F&& f)  // NOLINT(google-explicit-constructor)
      : obj_(const_cast<void*>(static_cast<const void*>(std::addressof(f)))),
        call_([](void* o, A... a) -> R { return (*static_cast<std::remove_reference_t<F>*>(o))(std::forward<A>(a)...); }) {}

  R operator()(A... a) const { return call_(obj_, std::forward<A>(a)...); }

 private:
  void* obj_;
  R (*call_)(void*, A...);
};

/// The continuation returns true to stop the search.
using Continuation = FunctionRef<bool()>;

void solve_general(const Model& m, const CompiledQuery& q, bool stop_at_first, std::vector<Row>& out);
void solve_conjunctive(const Model& m, const CompiledQuery& q, bool stop_at_first, std::vector<Row>& out);

}  // namespace detail
}  // namespace pddlenv::inference

#endif  // PDDLENV_INFERENCE_NODE_HPP
