#include "pddlenv/env.hpp"

#include <algorithm>

#include "pddlenv/pddl.hpp"
#include "simulator.hpp"

namespace pddlenv {

PddlSource PddlSource::from_file(const std::filesystem::path& path) {
  return PddlSource{pddl::read_file(path), path.string(), path};
}

PddlSource PddlSource::from_text(std::string text, std::string label) {
  return PddlSource{std::move(text), std::move(label), std::nullopt};
}

std::pair<State, int> apply_effect(const State& s, const Effect& e, Rng& rng) {
  const DeterministicEffect* chosen = nullptr;
  int index = 0;
  if (e.is_probabilistic()) {
    double u = rng.uniform_real();
    double cumulative = 0.0;
    index = -1;
    const auto& outcomes = e.outcomes();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      cumulative += outcomes[i].probability.value();
      if (u < cumulative) {
        index = static_cast<int>(i);
        chosen = &outcomes[i].effect;
        break;
      }
    }
    if (!chosen) return {s, -1};
  } else {
    chosen = &e.as_deterministic();
  }
  for (const auto* set : {&chosen->add, &chosen->del})
    for (const auto& l : *set)
      if (!l.is_ground()) throw ContractError("apply_effect needs a ground effect; got " + to_string(l));
  if (chosen->empty()) return {s, index};

  std::vector<Literal> next;
  next.reserve(s.literals().size() + chosen->add.size());
  for (const auto& l : s.literals())
    if (!chosen->del.count(l)) next.push_back(l);
  next.insert(next.end(), chosen->add.begin(), chosen->add.end());
  return {s.with_literals(std::move(next)), index};
}

// ---------------------------------------------------------------------------

Env::Env(std::shared_ptr<const Simulator> sim, EnvConfig cfg)
    : sim_(std::move(sim)), cfg_(cfg), rng_(cfg.seed.value_or(Rng::kDefaultSeed)) {
  if (cfg_.max_episode_length && *cfg_.max_episode_length == 0)
    throw ConfigurationError("max_episode_length must be positive");
}

Env Env::make(const PddlSource& domain, const std::vector<PddlSource>& problems, EnvConfig cfg) {
  if (problems.empty()) throw ConfigurationError("an environment needs at least one problem");
  auto d = std::make_shared<const Domain>(pddl::parse_domain(domain.text, domain.label));
  std::vector<Problem> parsed;
  std::vector<std::string> labels;
  std::vector<std::optional<std::filesystem::path>> files;
  for (const auto& p : problems) {
    parsed.push_back(pddl::parse_problem(p.text, *d, p.label));
    labels.push_back(p.label);
    files.push_back(p.path);
  }
  auto sim = std::make_shared<const Simulator>(std::move(d), std::move(parsed), std::move(labels), std::move(files),
                                               domain.label, domain.path, cfg.operators_as_actions);
  return Env(std::move(sim), cfg);
}

Env Env::make(const std::string& domain_text, const std::vector<std::string>& problem_texts, EnvConfig cfg) {
  std::vector<PddlSource> problems;
  for (std::size_t i = 0; i < problem_texts.size(); ++i)
    problems.push_back(PddlSource::from_text(problem_texts[i], "problem" + std::to_string(i)));
  return make(PddlSource::from_text(domain_text, "domain"), problems, cfg);
}

Env Env::make(std::shared_ptr<const Domain> domain, std::vector<Problem> problems,
              std::vector<std::string> problem_labels, EnvConfig cfg, std::string domain_label) {
  auto sim = std::make_shared<const Simulator>(std::move(domain), std::move(problems), std::move(problem_labels),
                                               std::vector<std::optional<std::filesystem::path>>{},
                                               std::move(domain_label), std::nullopt, cfg.operators_as_actions);
  return Env(std::move(sim), cfg);
}

std::shared_ptr<const inference::Model> Env::model_for(const State& s) const {
  if (cfg_.cache && cache_.model && cache_.state && *cache_.state == s) return cache_.model;
  auto model = std::make_shared<const inference::Model>(sim_->universe_for(s), s);
  if (cfg_.cache) {
    cache_.state = s;
    cache_.model = model;
    cache_.valid.reset();
  }
  return model;
}

std::pair<State, ResetInfo> Env::reset() {
  problem_index_ = rng_.uniform_index(sim_->problem_count());
  const ProblemData& pd = sim_->problem(problem_index_);
  state_ = *pd.initial;
  steps_ = 0;
  ResetInfo info{sim_->domain_label(), pd.label, problem_index_, sim_->domain_file(), pd.file};
  return {observe(*state_), std::move(info)};
}

std::optional<OperatorMatch> Env::match_operator(const State& s, const GroundAction& a) const {
  const OperatorSchema* schema = sim_->schema_for(a.predicate());
  const Domain& d = sim_->domain();
  if (!schema) {
    const Predicate* p = d.find_predicate(a.predicate());
    if (p && p->is_action_predicate) return std::nullopt;  // declared but used by no operator
    throw ContractError("'" + a.predicate() + "' is not an action predicate of domain '" + d.name + "'");
  }
  if (a.args().size() != schema->action_args.size())
    throw ContractError("action " + to_string(a) + " has " + std::to_string(a.args().size()) + " arguments, expected " +
                        std::to_string(schema->action_args.size()));

  auto model = model_for(s);
  const inference::Universe& u = model->universe();
  const Operator& op = *schema->op;
  Substitution sub;
  std::vector<bool> bound(op.parameters.size(), false);
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    int id = u.object_id(a.args()[i].name);
    if (id < 0) throw ContractError("action " + to_string(a) + " mentions unknown object '" + a.args()[i].name + "'");
    const Term& object = u.object(id);
    int param = schema->arg_param[i];
    if (param < 0) {
      if (object.name != schema->action_args[i].name) return std::nullopt;
      continue;
    }
    const Term& var = op.parameters[static_cast<std::size_t>(param)];
    if (bound[static_cast<std::size_t>(param)]) {
      if (sub.lookup(var.name)->name != object.name) return std::nullopt;
      continue;
    }
    if (!d.types.is_subtype(object.type, var.type)) return std::nullopt;
    sub.bind_unchecked(var, object);
    bound[static_cast<std::size_t>(param)] = true;
  }

  std::vector<Term> rest;
  for (std::size_t k = 0; k < op.parameters.size(); ++k)
    if (!bound[k]) rest.push_back(op.parameters[k]);
  Formula body = apply_substitution(schema->body, sub, d.types);
  inference::CompiledQuery q(u, inference::Query{std::move(body), rest, inference::Mode::FirstSolution});
  auto rows = model->solve(q);
  if (rows.empty()) return std::nullopt;
  for (std::size_t k = 0; k < rest.size(); ++k) sub.bind_unchecked(rest[k], u.object(rows[0][k]));
  return OperatorMatch{&op, std::move(sub)};
}

std::vector<GroundAction> Env::enumerate_valid_actions(const State& s) const {
  auto model = model_for(s);
  bool cached_state = cfg_.cache && cache_.model == model;
  if (cached_state && cache_.valid) return *cache_.valid;

  const ProblemData* pd = sim_->problem_for(s);
  const inference::Universe& u = model->universe();
  std::vector<GroundAction> out;
  const auto& schemas = sim_->schemas();
  for (std::size_t i = 0; i < schemas.size(); ++i) {
    const OperatorSchema& schema = schemas[i];
    std::optional<inference::CompiledQuery> local;
    const inference::CompiledQuery* q;
    if (pd) {
      q = &pd->enumerate[i];
    } else {
      local.emplace(u, inference::Query{schema.body, schema.op->parameters, inference::Mode::AllSolutions});
      q = &*local;
    }
    for (const auto& row : model->solve(*q)) {
      GroundAction a{Literal{schema.action_predicate, {}, false}};
      for (std::size_t k = 0; k < schema.action_args.size(); ++k) {
        int param = schema.arg_param[k];
        if (param < 0) {
          int id = u.object_id(schema.action_args[k].name);
          a.literal.args.push_back(id >= 0 ? u.object(id) : schema.action_args[k]);
        } else {
          a.literal.args.push_back(u.object(row[static_cast<std::size_t>(param)]));
        }
      }
      out.push_back(std::move(a));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (cached_state) cache_.valid = out;
  return out;
}

std::vector<GroundAction> Env::all_actions(const State& s) const {
  if (const ProblemData* pd = sim_->problem_for(s)) return pd->all_actions;
  return sim_->ground_all_actions(s.objects());
}

GroundAction Env::sample_action(const State& s, Rng& rng) const {
  if (cfg_.dynamic_action_space) {
    auto valid = enumerate_valid_actions(s);
    if (valid.empty()) throw DeadEndError("no valid actions in the current state");
    return valid[rng.uniform_index(valid.size())];
  }
  if (const ProblemData* pd = sim_->problem_for(s)) {
    if (pd->all_actions.empty()) throw DeadEndError("the action space is empty");
    return pd->all_actions[rng.uniform_index(pd->all_actions.size())];
  }
  auto all = sim_->ground_all_actions(s.objects());
  if (all.empty()) throw DeadEndError("the action space is empty");
  return all[rng.uniform_index(all.size())];
}

bool Env::goal_holds(const State& s) const { return model_for(s)->holds(s.goal()); }

State Env::observe(const State& s) const {
  if (!sim_->has_derived()) return s;
  auto derived = model_for(s)->derived_literals();
  if (derived.empty()) return s;
  std::vector<Literal> literals = s.literals();
  literals.insert(literals.end(), derived.begin(), derived.end());
  return s.with_literals(std::move(literals));
}

StepResult Env::step(const GroundAction& action) {
  if (!state_) throw ContractError("step() called before reset()");
  StepInfo info;
  info.problem = sim_->problem(problem_index_).label;
  auto match = match_operator(*state_, action);
  if (match) {
    Effect grounded = ground_effect(match->op->effect, match->substitution, sim_->domain().types);
    auto [next, index] = apply_effect(*state_, grounded, rng_);
    state_ = std::move(next);
    info.operator_name = match->op->name;
    info.substitution = std::move(match->substitution);
    info.effect_index = index;
  } else if (cfg_.raise_error_on_invalid_action) {
    throw InvalidActionError("no operator matches " + to_string(action) + " in the current state");
  }
  ++steps_;

  StepResult r{observe(*state_), 0.0, false, std::move(info)};
  r.done = goal_holds(*state_);
  r.reward = r.done ? 1.0 : 0.0;
  if (!r.done && cfg_.max_episode_length && steps_ >= *cfg_.max_episode_length) {
    r.done = true;
    r.info.truncated = true;
  }
  return r;
}

const State& Env::state() const {
  if (!state_) throw ContractError("no current state; call reset() first");
  return *state_;
}

void Env::set_state(const State& s) {
  const Domain& d = sim_->domain();
  std::vector<Literal> base;
  for (const auto& l : s.literals()) {
    const Predicate* p = d.find_predicate(l.predicate);
    if (!p) throw ContractError("state uses undeclared predicate '" + l.predicate + "'");
    if (!p->is_derived) base.push_back(l);
  }
  state_ = s.with_literals(std::move(base));
  steps_ = 0;
  if (const ProblemData* pd = sim_->problem_for(*state_)) problem_index_ = static_cast<std::size_t>(pd - &sim_->problem(0));
}

Env Env::with_config(EnvConfig cfg) const {
  if (cfg.operators_as_actions != cfg_.operators_as_actions)
    throw ConfigurationError("with_config cannot change operators_as_actions");
  Env copy(sim_, cfg);
  copy.state_ = state_;
  copy.problem_index_ = problem_index_;
  copy.steps_ = steps_;
  if (!cfg.seed) copy.rng_ = rng_;
  return copy;
}

const Domain& Env::domain() const { return sim_->domain(); }
const std::shared_ptr<const Domain>& Env::source_domain() const { return sim_->source(); }
const std::vector<Problem>& Env::problems() const { return sim_->problems(); }
const std::vector<std::string>& Env::problem_labels() const { return sim_->labels(); }
const State& Env::initial_state(std::size_t i) const { return *sim_->problem(i).initial; }

std::vector<std::string> Env::action_predicates() const {
  std::vector<std::string> out;
  for (const auto& p : sim_->domain().predicates)
    if (p.is_action_predicate) out.push_back(p.name);
  return out;
}

}  // namespace pddlenv
