#pragma once

// Derived automata: observer, epsilon plant, lifted observer and the
// faulty / normal / secret-deleted subautomata.

#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "desv/graph.hpp"
#include "desv/lfsa.hpp"

namespace desv {

/// Renders a state set of `model` as "{q0,q1}".
inline std::string set_name(const Lfsa& model, const StateSet& x) {
  if (x.empty()) return "∅";
  std::string out = "{";
  bool first = true;
  for (StateId q : x) {
    if (!first) out += ",";
    out += model.state_name(q);
    first = false;
  }
  return out + "}";
}

/// Deterministic powerset automaton over current-state estimates. Only the
/// part reachable from the roots is materialized.
struct ObserverAutomaton {
  std::vector<StateSet> states;
  std::vector<LabelId> alphabet;                 // l(E_o), ascending
  std::vector<std::vector<std::uint32_t>> delta;  // [state][alphabet position]
  std::uint32_t initial = 0;
  std::vector<std::string> outputs;  // Sigma of the source model
  std::vector<std::string> state_labels;
  std::unordered_map<StateSet, std::uint32_t, StateSetHash> index;

  std::optional<std::uint32_t> find(const StateSet& x) const {
    auto it = index.find(x);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::uint32_t> empty_state() const { return find(StateSet{}); }

  std::optional<std::size_t> alphabet_position(LabelId a) const {
    auto it = std::lower_bound(alphabet.begin(), alphabet.end(), a);
    if (it == alphabet.end() || *it != a) return std::nullopt;
    return static_cast<std::size_t>(it - alphabet.begin());
  }

  std::uint32_t successor(std::uint32_t x, LabelId a) const {
    auto pos = alphabet_position(a);
    if (!pos) throw ModelError("label is not in the observer alphabet");
    return delta.at(x).at(*pos);
  }
};

/// Observer reachable from the given roots (the first root is the initial
/// state). Roots are interned as given.
inline ObserverAutomaton build_observer(const Lfsa& model, const std::vector<StateSet>& roots) {
  ObserverAutomaton obs;
  obs.alphabet = model.observable_labels();
  obs.outputs = model.output_names();
  std::deque<std::uint32_t> frontier;
  auto intern = [&](const StateSet& x) {
    auto [it, inserted] = obs.index.emplace(x, static_cast<std::uint32_t>(obs.states.size()));
    if (inserted) {
      obs.states.push_back(x);
      obs.state_labels.push_back(set_name(model, x));
      obs.delta.emplace_back();
      frontier.push_back(it->second);
    }
    return it->second;
  };
  for (const auto& r : roots) intern(r);
  while (!frontier.empty()) {
    const std::uint32_t x = frontier.front();
    frontier.pop_front();
    std::vector<std::uint32_t> row;
    for (LabelId a : obs.alphabet) row.push_back(intern(estimate_step(model, obs.states[x], a)));
    obs.delta[x] = std::move(row);
  }
  return obs;
}

inline ObserverAutomaton build_observer(const Lfsa& model) {
  return build_observer(model, {unobservable_reach(model, model.initial())});
}

/// S_eps: events are the observable labels themselves plus one reserved
/// unobservable event.
struct EpsilonPlant {
  Lfsa automaton;
  EventId epsilon_event = 0;
  std::vector<EventId> event_of_label;  // indexed by LabelId; kEpsilon if unused
};

inline EpsilonPlant epsilonize(const Lfsa& model) {
  for (const auto& a : model.output_names()) {
    if (a == kEpsilonEvent) throw ModelError("output '" + a + "' collides with the reserved event");
  }
  EpsilonPlant plant;
  LfsaParts parts;
  parts.state_names = model.state_names();
  parts.output_names = model.output_names();
  parts.initial = model.initial().ids();
  plant.event_of_label.assign(model.num_outputs(), kEpsilon);
  for (LabelId a : model.observable_labels()) {
    plant.event_of_label[a] = static_cast<EventId>(parts.event_names.size());
    parts.event_names.push_back(model.output_name(a));
    parts.event_labels.push_back(a);
  }
  plant.epsilon_event = static_cast<EventId>(parts.event_names.size());
  parts.event_names.emplace_back(kEpsilonEvent);
  parts.event_labels.push_back(kEpsilon);
  for (const Transition& t : model.transitions()) {
    const LabelId a = model.label(t.event);
    parts.transitions.push_back(
        {t.from, a == kEpsilon ? plant.epsilon_event : plant.event_of_label[a], t.to});
  }
  plant.automaton = Lfsa(std::move(parts));
  return plant;
}

/// The observer as an automaton with self-labelled events and, by default,
/// an extra unobservable event that has no transitions.
inline Lfsa lift_observer(const ObserverAutomaton& obs, bool with_epsilon = true) {
  LfsaParts parts;
  parts.state_names = obs.state_labels;
  parts.output_names = obs.outputs;
  for (LabelId a : obs.alphabet) {
    parts.event_names.push_back(obs.outputs.at(a));
    parts.event_labels.push_back(a);
  }
  if (with_epsilon) {
    parts.event_names.emplace_back(kEpsilonEvent);
    parts.event_labels.push_back(kEpsilon);
  }
  for (std::uint32_t x = 0; x < obs.states.size(); ++x) {
    for (std::size_t i = 0; i < obs.alphabet.size(); ++i) {
      parts.transitions.push_back({x, static_cast<EventId>(i), obs.delta[x][i]});
    }
  }
  parts.initial = {obs.initial};
  return Lfsa(std::move(parts));
}

/// A subautomaton plus the audit trail of its construction. State ids of
/// `automaton` map back to the source through `original_state`; event ids
/// are shared with the source.
struct SubautomatonReport {
  Lfsa automaton;
  std::vector<Transition> kept;
  std::vector<Transition> dropped;
  std::vector<StateId> original_state;

  StateId to_original(StateId q) const { return original_state.at(q); }
};

namespace detail {

inline SubautomatonReport restrict_to(const Lfsa& model, const std::vector<bool>& keep_transition,
                                      const std::vector<bool>& keep_state) {
  SubautomatonReport report;
  std::vector<StateId> renumber(model.num_states(), 0);
  LfsaParts parts;
  parts.event_names = model.event_names();
  parts.event_labels = model.event_labels();
  parts.output_names = model.output_names();
  for (StateId q = 0; q < model.num_states(); ++q) {
    if (!keep_state[q]) continue;
    renumber[q] = static_cast<StateId>(parts.state_names.size());
    parts.state_names.push_back(model.state_name(q));
    report.original_state.push_back(q);
  }
  const auto all = model.transitions();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Transition& t = all[i];
    if (keep_transition[i] && keep_state[t.from] && keep_state[t.to]) {
      report.kept.push_back(t);
      parts.transitions.push_back({renumber[t.from], t.event, renumber[t.to]});
    } else {
      report.dropped.push_back(t);
    }
  }
  for (StateId q : model.initial()) {
    if (keep_state[q]) parts.initial.push_back(renumber[q]);
  }
  report.automaton = Lfsa(std::move(parts));
  return report;
}

}  // namespace detail

/// S_f: faulty transitions together with all their predecessors and
/// successors.
inline SubautomatonReport faulty_subautomaton(const Lfsa& model, const FaultSpec& faults) {
  for (EventId e : faults.faulty) {
    if (e >= model.num_events()) throw ModelError("faulty event out of range");
  }
  const auto all = model.transitions();
  std::vector<bool> fault_source(model.num_states(), false);
  std::vector<StateId> fault_targets;
  for (const Transition& t : all) {
    if (faults.contains(t.event)) {
      fault_source[t.from] = true;
      fault_targets.push_back(t.to);
    }
  }
  // Predecessor: its target reaches (reflexively) the source of a fault.
  const auto before = coreachable(model, fault_source);
  // Successor: its source is reachable (reflexively) from a fault target.
  const auto after = reachable(model, StateSet(fault_targets), Reach::kReflexive).to_mask(model.num_states());

  std::vector<bool> keep_transition(all.size(), false);
  std::vector<bool> keep_state(model.num_states(), false);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Transition& t = all[i];
    if (faults.contains(t.event) || before[t.to] || after[t.from]) {
      keep_transition[i] = true;
      keep_state[t.from] = keep_state[t.to] = true;
    }
  }
  return detail::restrict_to(model, keep_transition, keep_state);
}

/// S_n: faulty transitions removed, trimmed to the part reachable from Q0.
inline SubautomatonReport normal_subautomaton(const Lfsa& model, const FaultSpec& faults) {
  for (EventId e : faults.faulty) {
    if (e >= model.num_events()) throw ModelError("faulty event out of range");
  }
  const auto all = model.transitions();
  std::vector<bool> keep_transition(all.size(), false);
  for (std::size_t i = 0; i < all.size(); ++i) keep_transition[i] = !faults.contains(all[i].event);

  std::vector<bool> keep_state = model.initial().to_mask(model.num_states());
  std::vector<StateId> stack(model.initial().begin(), model.initial().end());
  while (!stack.empty()) {
    StateId q = stack.back();
    stack.pop_back();
    for (auto i : model.out_edges(q)) {
      const Transition& t = model.transition(i);
      if (keep_transition[i] && !keep_state[t.to]) {
        keep_state[t.to] = true;
        stack.push_back(t.to);
      }
    }
  }
  return detail::restrict_to(model, keep_transition, keep_state);
}

/// S_dss: secret states deleted, then the accessible part of the remainder.
inline SubautomatonReport delete_secret(const Lfsa& model, const SecretSpec& secrets) {
  for (StateId q : secrets.secret) {
    if (q >= model.num_states()) throw ModelError("secret state out of range");
  }
  const auto all = model.transitions();
  std::vector<bool> keep_transition(all.size(), false);
  for (std::size_t i = 0; i < all.size(); ++i) {
    keep_transition[i] = !secrets.secret.contains(all[i].from) && !secrets.secret.contains(all[i].to);
  }
  std::vector<bool> keep_state(model.num_states(), false);
  std::vector<StateId> stack;
  for (StateId q : model.initial()) {
    if (!secrets.secret.contains(q)) {
      keep_state[q] = true;
      stack.push_back(q);
    }
  }
  while (!stack.empty()) {
    StateId q = stack.back();
    stack.pop_back();
    for (auto i : model.out_edges(q)) {
      const Transition& t = model.transition(i);
      if (keep_transition[i] && !keep_state[t.to]) {
        keep_state[t.to] = true;
        stack.push_back(t.to);
      }
    }
  }
  return detail::restrict_to(model, keep_transition, keep_state);
}

}  // namespace desv
