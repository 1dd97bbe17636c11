#include "pddlenv/planner.hpp"

#include <algorithm>
#include <queue>
#include <unordered_set>

#include "pddlenv/pddl.hpp"

namespace pddlenv::planner {

namespace {

using Clock = std::chrono::steady_clock;

void flatten(const Formula& f, std::vector<const Formula*>& out) {
  if (f.kind() == Formula::Kind::And) {
    for (const auto& c : f.children()) flatten(c, out);
  } else {
    out.push_back(&f);
  }
}

bool is_predicate(const Domain& d, const std::string& name, bool Predicate::*flag) {
  const Predicate* p = d.find_predicate(name);
  return p && p->*flag;
}

Literal ground(const Literal& l, const Substitution& sub) {
  Literal out = l;
  for (auto& a : out.args)
    if (const Term* v = sub.lookup(a.name)) a = *v;
  return out;
}

}  // namespace

std::string to_string(PlanResult::Status status) {
  switch (status) {
    case PlanResult::Status::Solved:
      return "solved";
    case PlanResult::Status::Timeout:
      return "timeout";
    case PlanResult::Status::Unsolvable:
      return "unsolvable";
  }
  return "unknown";
}

DeterministicEffect most_likely_outcome(const Effect& e) {
  if (!e.is_probabilistic()) return e.as_deterministic();
  const Outcome* best = nullptr;
  for (const auto& o : e.outcomes())
    if (!best || best->probability < o.probability) best = &o;
  if (!best || best->probability < e.residual()) return {};
  return best->effect;
}

// ---------------------------------------------------------------------------
// h_add

HAdd::HAdd(const Env& env, const State& reference) : env_(&env) {
  const Domain& d = env.domain();
  std::unordered_set<std::string> fluent;
  auto note = [&](const DeterministicEffect& e) {
    for (const auto& l : e.add) fluent.insert(l.predicate);
    for (const auto& l : e.del) fluent.insert(l.predicate);
  };
  for (const auto& op : d.operators) {
    if (op.effect.is_probabilistic()) {
      for (const auto& o : op.effect.outcomes()) note(o.effect);
    } else {
      note(op.effect.as_deterministic());
    }
  }
  fluent_.assign(d.predicates.size(), 0);
  for (std::size_t i = 0; i < d.predicates.size(); ++i) fluent_[i] = fluent.count(d.predicates[i].name) ? 1 : 0;

  auto model = env.model(reference);
  auto intern = [&](const Literal& l) {
    auto [it, _] = facts_.emplace(pddlenv::to_string(l), static_cast<int>(facts_.size()));
    return it->second;
  };
  for (const auto& op : d.operators) {
    std::vector<const Formula*> conjuncts;
    flatten(op.precondition, conjuncts);
    std::vector<Formula> statics;
    std::vector<Literal> pre;
    for (const Formula* c : conjuncts) {
      bool equality = c->kind() == Formula::Kind::Equal ||
                      (c->kind() == Formula::Kind::Not && c->body().kind() == Formula::Kind::Equal);
      if (equality) {
        statics.push_back(*c);
        continue;
      }
      if (c->kind() != Formula::Kind::Atom) continue;
      const Literal& l = c->literal();
      if (is_predicate(d, l.predicate, &Predicate::is_action_predicate) ||
          is_predicate(d, l.predicate, &Predicate::is_derived))
        continue;
      if (!fluent.count(l.predicate)) {
        statics.push_back(*c);
      } else if (!l.negated) {
        pre.push_back(l);
      }
    }
    DeterministicEffect effect = most_likely_outcome(op.effect);
    inference::Query q{Formula::conjunction(std::move(statics)), op.parameters, inference::Mode::AllSolutions};
    for (const auto& sub : model->find_assignments(q)) {
      RelaxedOp r;
      for (const auto& l : pre) r.pre.push_back(intern(ground(l, sub)));
      for (const auto& l : effect.add) r.add.push_back(intern(ground(l, sub)));
      std::sort(r.pre.begin(), r.pre.end());
      r.pre.erase(std::unique(r.pre.begin(), r.pre.end()), r.pre.end());
      ops_.push_back(std::move(r));
    }
  }
}

int HAdd::fact_id(const Literal& l) const {
  auto it = facts_.find(pddlenv::to_string(l));
  return it == facts_.end() ? -1 : it->second;
}

double HAdd::operator()(const State& s, const Formula& goal) const { return (*this)(s, goal, *env_->model(s)); }

double HAdd::operator()(const State& s, const Formula& goal, const inference::Model& model) const {
  std::vector<double> cost(facts_.size(), kInfinity);
  for (const auto& l : s.literals()) {
    int id = fact_id(l);
    if (id >= 0) cost[static_cast<std::size_t>(id)] = 0.0;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& op : ops_) {
      double c = 1.0;
      for (int p : op.pre) {
        c += cost[static_cast<std::size_t>(p)];
        if (c == kInfinity) break;
      }
      if (c == kInfinity) continue;
      for (int a : op.add) {
        if (c < cost[static_cast<std::size_t>(a)]) {
          cost[static_cast<std::size_t>(a)] = c;
          changed = true;
        }
      }
    }
  }
  return goal_cost(goal, s, model, cost);
}

double HAdd::goal_cost(const Formula& f, const State& s, const inference::Model& model,
                       const std::vector<double>& cost) const {
  const Domain& d = env_->domain();
  switch (f.kind()) {
    case Formula::Kind::Equal:
      return f.lhs().name == f.rhs().name ? 0.0 : kInfinity;
    case Formula::Kind::Atom: {
      const Literal& l = f.literal();
      const Predicate* p = d.find_predicate(l.predicate);
      bool is_fluent = p && fluent_[static_cast<std::size_t>(p - d.predicates.data())];
      bool derived = p && p->is_derived;
      bool truth = model.contains(l.positive());
      if (l.negated) return !truth ? 0.0 : (is_fluent || derived ? 1.0 : kInfinity);
      if (truth) return 0.0;
      if (derived) return 1.0;
      if (!is_fluent) return kInfinity;
      int id = fact_id(l);
      return id < 0 ? kInfinity : cost[static_cast<std::size_t>(id)];
    }
    case Formula::Kind::Not:
      return model.holds(f.body()) ? 1.0 : 0.0;
    case Formula::Kind::And: {
      double total = 0.0;
      for (const auto& c : f.children()) total += goal_cost(c, s, model, cost);
      return total;
    }
    case Formula::Kind::Or: {
      double best = kInfinity;
      for (const auto& c : f.children()) best = std::min(best, goal_cost(c, s, model, cost));
      return best;
    }
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      bool all = f.kind() == Formula::Kind::ForAll;
      const auto& vars = f.variables();
      const inference::Universe& u = model.universe();
      std::vector<const std::vector<int>*> domains;
      for (const auto& v : vars) {
        domains.push_back(&u.members(v.type));
        if (domains.back()->empty()) return all ? 0.0 : kInfinity;
      }
      double acc = all ? 0.0 : kInfinity;
      std::vector<std::size_t> idx(vars.size(), 0);
      while (true) {
        Substitution sub;
        for (std::size_t k = 0; k < vars.size(); ++k) sub.bind_unchecked(vars[k], u.object((*domains[k])[idx[k]]));
        double c = goal_cost(apply_substitution(f.body(), sub, d.types), s, model, cost);
        acc = all ? acc + c : std::min(acc, c);
        std::size_t k = vars.size();
        while (k > 0 && ++idx[k - 1] == domains[k - 1]->size()) {
          idx[k - 1] = 0;
          --k;
        }
        if (k == 0) break;
      }
      return acc;
    }
  }
  return kInfinity;
}

double h_add(const State& s, const Formula& goal, const Env& env) { return HAdd(env, s)(s, goal); }

// ---------------------------------------------------------------------------
// Search

namespace {

EnvConfig search_config(const Env& env) {
  EnvConfig cfg;
  cfg.operators_as_actions = env.config().operators_as_actions;
  return cfg;
}

}  // namespace

PlanResult plan_gbfs(const Env& env, const State& start, std::chrono::duration<double> timeout) {
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(timeout);
  PlanResult result;
  auto finish = [&](PlanResult::Status status) {
    result.status = status;
    result.plan.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return result;
  };

  Env search = env.with_config(search_config(env));
  const Formula& goal = start.goal();
  const TypeHierarchy& types = search.domain().types;
  HAdd h(search, start);
  Rng unused;

  struct Node {
    State state;
    std::size_t parent;
    GroundAction action;
  };
  std::vector<Node> nodes;
  using Entry = std::tuple<double, std::size_t, std::size_t>;  // h, insertion order, node
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::unordered_set<State, StateHash> seen;

  auto extract = [&](std::size_t i) {
    std::vector<GroundAction> plan;
    while (i != 0) {
      plan.push_back(nodes[i].action);
      i = nodes[i].parent;
    }
    std::reverse(plan.begin(), plan.end());
    return plan;
  };

  {
    auto model = search.model(start);
    if (model->holds(goal)) return finish(PlanResult::Status::Solved);
    double h0 = h(start, goal, *model);
    if (h0 == kInfinity) return finish(PlanResult::Status::Unsolvable);
    nodes.push_back({start, 0, {}});
    seen.insert(start);
    open.emplace(h0, 0, 0);
  }
  std::size_t order = 1;

  while (!open.empty()) {
    if (Clock::now() >= deadline) return finish(PlanResult::Status::Timeout);
    std::size_t current = std::get<2>(open.top());
    open.pop();
    ++result.plan.stats.expansions;
    State state = nodes[current].state;

    std::vector<std::pair<GroundAction, State>> successors;
    for (const auto& a : search.enumerate_valid_actions(state)) {
      auto match = search.match_operator(state, a);
      if (!match) continue;
      Effect grounded = ground_effect(match->op->effect, match->substitution, types);
      Effect chosen = Effect::deterministic(most_likely_outcome(grounded));
      successors.emplace_back(a, apply_effect(state, chosen, unused).first);
    }
    for (auto& [action, next] : successors) {
      if (!seen.insert(next).second) continue;
      ++result.plan.stats.generated;
      nodes.push_back({std::move(next), current, action});
      std::size_t id = nodes.size() - 1;
      auto model = search.model(nodes[id].state);
      if (model->holds(goal)) {
        result.plan.actions = extract(id);
        return finish(PlanResult::Status::Solved);
      }
      double hv = h(nodes[id].state, goal, *model);
      if (hv == kInfinity) continue;
      open.emplace(hv, order++, id);
    }
  }
  return finish(PlanResult::Status::Unsolvable);
}

PlanResult plan_gbfs(const Env& env, std::size_t problem_index, std::chrono::duration<double> timeout) {
  return plan_gbfs(env, env.initial_state(problem_index), timeout);
}

bool validate_plan(const Env& env, const State& start, const std::vector<GroundAction>& plan) {
  Env run = env.with_config(search_config(env));
  run.set_state(start);
  if (plan.empty()) return run.goal_holds(run.state());
  double reward = 0.0;
  for (const auto& a : plan) {
    try {
      if (!run.match_operator(run.state(), a)) return false;
      reward = run.step(a).reward;
    } catch (const ContractError&) {
      return false;
    }
  }
  return reward == 1.0;
}

bool validate_plan(const Env& env, std::size_t problem_index, const std::vector<GroundAction>& plan) {
  return validate_plan(env, env.initial_state(problem_index), plan);
}

std::string format_plan(const std::vector<GroundAction>& plan) {
  std::string out;
  for (const auto& a : plan) out += pddlenv::to_string(a) + "\n";
  return out;
}

std::vector<GroundAction> parse_plan(std::string_view text, std::string_view file) {
  return pddl::parse_ground_actions(text, file);
}

}  // namespace pddlenv::planner
