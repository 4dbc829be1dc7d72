#pragma once

// Labeled finite-state automata: the data model every verifier consumes.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace desv {

using StateId = std::uint32_t;
using EventId = std::uint32_t;
using LabelId = std::uint32_t;

/// Label of an unobservable event.
inline constexpr LabelId kEpsilon = std::numeric_limits<LabelId>::max();

/// Event identifier reserved for the single collapsed unobservable event of
/// epsilon plants and lifted observers. Rejected in user models.
inline constexpr std::string_view kEpsilonEvent = "<eps>";

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Transition {
  StateId from = 0;
  EventId event = 0;
  StateId to = 0;

  friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// A set of states kept as a sorted vector so equality, ordering and hashing
/// are canonical.
class StateSet {
 public:
  StateSet() = default;
  StateSet(std::initializer_list<StateId> ids) : ids_(ids) { normalize(); }
  explicit StateSet(std::vector<StateId> ids) : ids_(std::move(ids)) { normalize(); }

  static StateSet from_mask(const std::vector<bool>& mask) {
    StateSet out;
    for (StateId q = 0; q < mask.size(); ++q) {
      if (mask[q]) out.ids_.push_back(q);
    }
    return out;
  }

  bool contains(StateId q) const { return std::binary_search(ids_.begin(), ids_.end(), q); }
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  const std::vector<StateId>& ids() const { return ids_; }

  void insert(StateId q) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), q);
    if (it == ids_.end() || *it != q) ids_.insert(it, q);
  }

  bool is_subset_of(const StateSet& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
  }

  StateSet intersect(const StateSet& other) const {
    StateSet out;
    std::set_intersection(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                          std::back_inserter(out.ids_));
    return out;
  }

  StateSet minus(const StateSet& other) const {
    StateSet out;
    std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                        std::back_inserter(out.ids_));
    return out;
  }

  StateSet unite(const StateSet& other) const {
    StateSet out;
    std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                   std::back_inserter(out.ids_));
    return out;
  }

  std::vector<bool> to_mask(std::size_t universe) const {
    std::vector<bool> mask(universe, false);
    for (StateId q : ids_) mask[q] = true;
    return mask;
  }

  friend bool operator==(const StateSet&, const StateSet&) = default;
  friend auto operator<=>(const StateSet& a, const StateSet& b) { return a.ids_ <=> b.ids_; }

 private:
  void normalize() {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  std::vector<StateId> ids_;
};

struct StateSetHash {
  std::size_t operator()(const StateSet& s) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ s.size();
    for (StateId q : s) h ^= q + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

struct FaultSpec {
  std::vector<EventId> faulty;  // sorted, unique

  bool contains(EventId e) const { return std::binary_search(faulty.begin(), faulty.end(), e); }
};

struct SecretSpec {
  StateSet secret;
};

/// Name-based description of an automaton, before validation.
struct RawLfsa {
  struct Event {
    std::string id;
    std::optional<std::string> label;  // nullopt is epsilon
  };
  struct Edge {
    std::string from;
    std::string event;
    std::string to;
  };

  std::vector<std::string> states;
  std::vector<Event> events;
  std::vector<std::string> outputs;
  std::vector<Edge> transitions;
  std::vector<std::string> initial;
};

/// Index-based construction input. Names are kept for printing.
struct LfsaParts {
  std::vector<std::string> state_names;
  std::vector<std::string> event_names;
  std::vector<LabelId> event_labels;
  std::vector<std::string> output_names;
  std::vector<Transition> transitions;
  std::vector<StateId> initial;
};

/// (Q, E, delta, Q0, Sigma, label). Immutable once constructed; every
/// constructor checks the well-formedness invariants.
class Lfsa {
 public:
  Lfsa() = default;

  explicit Lfsa(LfsaParts parts) {
    state_names_ = std::move(parts.state_names);
    event_names_ = std::move(parts.event_names);
    event_labels_ = std::move(parts.event_labels);
    output_names_ = std::move(parts.output_names);
    if (event_labels_.size() != event_names_.size()) {
      throw ModelError("event label table does not match the event list");
    }
    for (EventId e = 0; e < event_labels_.size(); ++e) {
      if (event_labels_[e] != kEpsilon && event_labels_[e] >= output_names_.size()) {
        throw ModelError("label of event '" + event_names_[e] + "' is not a declared output");
      }
    }
    for (const Transition& t : parts.transitions) {
      if (t.from >= state_names_.size() || t.to >= state_names_.size() ||
          t.event >= event_names_.size()) {
        throw ModelError("transition references an undeclared state or event");
      }
    }
    for (StateId q : parts.initial) {
      if (q >= state_names_.size()) throw ModelError("initial state is not declared");
    }
    transitions_ = std::move(parts.transitions);
    std::sort(transitions_.begin(), transitions_.end());
    transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());
    initial_ = StateSet(std::move(parts.initial));

    out_.assign(state_names_.size(), {});
    in_.assign(state_names_.size(), {});
    for (std::uint32_t i = 0; i < transitions_.size(); ++i) {
      out_[transitions_[i].from].push_back(i);
      in_[transitions_[i].to].push_back(i);
    }
    index_names();
  }

  std::size_t num_states() const { return state_names_.size(); }
  std::size_t num_events() const { return event_names_.size(); }
  std::size_t num_outputs() const { return output_names_.size(); }

  const std::string& state_name(StateId q) const { return state_names_.at(q); }
  const std::string& event_name(EventId e) const { return event_names_.at(e); }
  const std::string& output_name(LabelId a) const { return output_names_.at(a); }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& event_names() const { return event_names_; }
  const std::vector<std::string>& output_names() const { return output_names_; }
  const std::vector<LabelId>& event_labels() const { return event_labels_; }

  std::optional<StateId> find_state(std::string_view name) const { return lookup(state_index_, name); }
  std::optional<EventId> find_event(std::string_view name) const { return lookup(event_index_, name); }
  std::optional<LabelId> find_output(std::string_view name) const { return lookup(output_index_, name); }

  LabelId label(EventId e) const { return event_labels_.at(e); }
  bool observable(EventId e) const { return label(e) != kEpsilon; }

  /// Transitions in canonical (from, event, to) order.
  std::span<const Transition> transitions() const { return transitions_; }
  /// Indices into transitions() leaving / entering a state, canonical order.
  std::span<const std::uint32_t> out_edges(StateId q) const { return out_.at(q); }
  std::span<const std::uint32_t> in_edges(StateId q) const { return in_.at(q); }
  const Transition& transition(std::uint32_t index) const { return transitions_.at(index); }

  const StateSet& initial() const { return initial_; }

  /// Observable labels l(E_o), ascending.
  std::vector<LabelId> observable_labels() const {
    std::vector<LabelId> out;
    for (LabelId a : event_labels_) {
      if (a != kEpsilon) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  StateSet all_states() const {
    std::vector<StateId> ids(num_states());
    for (StateId q = 0; q < ids.size(); ++q) ids[q] = q;
    return StateSet(std::move(ids));
  }

  LfsaParts parts() const {
    return LfsaParts{state_names_, event_names_,  event_labels_,
                     output_names_, transitions_, initial_.ids()};
  }

 private:
  using Index = std::unordered_map<std::string, std::uint32_t>;

  static std::optional<std::uint32_t> lookup(const Index& index, std::string_view name) {
    auto it = index.find(std::string(name));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  void index_names() {
    auto build = [](const std::vector<std::string>& names, Index& index, const char* what) {
      index.clear();
      for (std::uint32_t i = 0; i < names.size(); ++i) {
        if (!index.emplace(names[i], i).second) {
          throw ModelError(std::string("duplicate ") + what + " identifier '" + names[i] + "'");
        }
      }
    };
    build(state_names_, state_index_, "state");
    build(event_names_, event_index_, "event");
    build(output_names_, output_index_, "output");
  }

  std::vector<std::string> state_names_;
  std::vector<std::string> event_names_;
  std::vector<LabelId> event_labels_;
  std::vector<std::string> output_names_;
  std::vector<Transition> transitions_;
  StateSet initial_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::vector<std::uint32_t>> in_;
  Index state_index_;
  Index event_index_;
  Index output_index_;
};

/// Checks a name-based description and builds the automaton. Each error names
/// the offending element.
inline Lfsa validate(const RawLfsa& raw) {
  auto check_token = [](const std::string& id, const char* what) {
    if (id.empty()) throw ModelError(std::string("empty ") + what + " identifier");
    if (id == kEpsilonEvent) {
      throw ModelError(std::string(what) + " identifier '" + id + "' is reserved");
    }
  };
  auto index_of = [](const std::vector<std::string>& names, const char* what) {
    std::unordered_map<std::string, std::uint32_t> index;
    for (std::uint32_t i = 0; i < names.size(); ++i) {
      if (!index.emplace(names[i], i).second) {
        throw ModelError(std::string("duplicate ") + what + " identifier '" + names[i] + "'");
      }
    }
    return index;
  };

  LfsaParts parts;
  parts.state_names = raw.states;
  parts.output_names = raw.outputs;
  for (const auto& s : raw.states) check_token(s, "state");
  for (const auto& a : raw.outputs) check_token(a, "output");
  for (const auto& e : raw.events) {
    check_token(e.id, "event");
    parts.event_names.push_back(e.id);
  }
  const auto states = index_of(parts.state_names, "state");
  const auto events = index_of(parts.event_names, "event");
  const auto outputs = index_of(parts.output_names, "output");

  for (const auto& e : raw.events) {
    if (!e.label) {
      parts.event_labels.push_back(kEpsilon);
      continue;
    }
    auto it = outputs.find(*e.label);
    if (it == outputs.end()) {
      throw ModelError("label '" + *e.label + "' of event '" + e.id + "' is not a declared output");
    }
    parts.event_labels.push_back(it->second);
  }

  auto state_of = [&](const std::string& name, const std::string& context) {
    auto it = states.find(name);
    if (it == states.end()) throw ModelError("undeclared state '" + name + "' in " + context);
    return it->second;
  };
  for (const auto& t : raw.transitions) {
    const std::string context = "transition (" + t.from + ", " + t.event + ", " + t.to + ")";
    auto ev = events.find(t.event);
    if (ev == events.end()) throw ModelError("undeclared event '" + t.event + "' in " + context);
    parts.transitions.push_back({state_of(t.from, context), ev->second, state_of(t.to, context)});
  }
  for (const auto& q : raw.initial) parts.initial.push_back(state_of(q, "initial states"));
  return Lfsa(std::move(parts));
}

}  // namespace desv
