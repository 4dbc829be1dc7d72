#pragma once

// Legacy diagnosability products: Jiang's twin plant, the Yoo-Lafortune
// verifier and Cassez's generalized twin plant. All three assume identity
// labels on observable events, one initial state and one unobservable fault.

#include <array>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "desv/composition.hpp"
#include "desv/graph.hpp"
#include "desv/property.hpp"

namespace desv {

enum class FaultTag : std::uint8_t { kPhi, kNormal, kFaulty };

inline std::string_view tag_name(FaultTag t) {
  switch (t) {
    case FaultTag::kPhi: return "φ";
    case FaultTag::kNormal: return "N";
    case FaultTag::kFaulty: return "F";
  }
  return "?";
}

struct TaggedState {
  StateId x1 = 0;
  FaultTag l1 = FaultTag::kNormal;
  StateId x2 = 0;
  FaultTag l2 = FaultTag::kNormal;

  friend auto operator<=>(const TaggedState&, const TaggedState&) = default;
};

/// `events[e]` records which model events the product event e moves; for the
/// twin plant and the verifier both sides carry the same event.
struct TaggedProduct {
  Lfsa automaton;
  std::vector<TaggedState> states;
  std::vector<ProductEvent> events;
};

struct LegacyVerdict {
  bool holds = true;
  std::vector<std::uint32_t> offending_cycle;  // product transition indices
  TaggedProduct product;
};

class LegacyScopeError : public ModelError {
 public:
  using ModelError::ModelError;
};

namespace detail {

inline void check_legacy_scope(const Lfsa& model, EventId fault) {
  if (fault >= model.num_events()) throw LegacyScopeError("fault event out of range");
  if (model.observable(fault)) {
    throw LegacyScopeError("fault event '" + model.event_name(fault) + "' must be unobservable");
  }
  if (model.initial().size() != 1) throw LegacyScopeError("exactly one initial state is required");
  for (EventId e = 0; e < model.num_events(); ++e) {
    if (model.observable(e) && model.output_name(model.label(e)) != model.event_name(e)) {
      throw LegacyScopeError("observable event '" + model.event_name(e) + "' is not labelled by itself");
    }
  }
}

enum class TaggedNaming { kSingle, kPairOfPairs, kQuadruple };

/// Interns tagged states reached from the initial one, calling
/// `expand(state, emit)` to enumerate (event, target) pairs.
template <typename Expand>
TaggedProduct explore_tagged(const Lfsa& model, TaggedState init, std::vector<std::string> event_names,
                             std::vector<LabelId> event_labels, std::vector<ProductEvent> events,
                             TaggedNaming naming, Expand expand) {
  TaggedProduct product;
  LfsaParts parts;
  parts.output_names = model.output_names();
  parts.event_names = std::move(event_names);
  parts.event_labels = std::move(event_labels);
  product.events = std::move(events);
  std::map<TaggedState, StateId> index;
  std::deque<StateId> frontier;
  auto intern = [&](TaggedState s) {
    auto [it, inserted] = index.emplace(s, static_cast<StateId>(product.states.size()));
    if (inserted) {
      product.states.push_back(s);
      const std::string a = model.state_name(s.x1), l1(tag_name(s.l1));
      const std::string b = model.state_name(s.x2), l2(tag_name(s.l2));
      switch (naming) {
        case TaggedNaming::kSingle: parts.state_names.push_back("(" + a + "," + l1 + ")"); break;
        case TaggedNaming::kPairOfPairs:
          parts.state_names.push_back("((" + a + "," + l1 + "),(" + b + "," + l2 + "))");
          break;
        case TaggedNaming::kQuadruple:
          parts.state_names.push_back("(" + a + "," + l1 + "," + b + "," + l2 + ")");
          break;
      }
      frontier.push_back(it->second);
    }
    return it->second;
  };
  parts.initial.push_back(intern(init));
  while (!frontier.empty()) {
    const StateId id = frontier.front();
    frontier.pop_front();
    const TaggedState s = product.states[id];
    expand(s, [&](EventId e, TaggedState to) { parts.transitions.push_back({id, e, intern(to)}); });
  }
  product.automaton = Lfsa(std::move(parts));
  return product;
}

/// A state with l1 != l2 lying on a cycle.
inline LegacyVerdict mixed_tag_cycle(TaggedProduct product) {
  LegacyVerdict v;
  const Lfsa& p = product.automaton;
  const SccPartition scc = scc_partition(p);
  for (StateId s = 0; s < p.num_states(); ++s) {
    if (scc.on_cycle(s) && product.states[s].l1 != product.states[s].l2) {
      v.holds = false;
      v.offending_cycle = cycle_through(p, scc, s, nullptr);
      break;
    }
  }
  v.product = std::move(product);
  return v;
}

}  // namespace detail

/// S_phi: observable events only, each step an unobservable string followed
/// by one observable event. The target is tagged F when the connecting string
/// contains the fault (or the source is already F) and phi otherwise; both
/// targets appear when both kinds of connecting string exist.
inline TaggedProduct build_s_phi(const Lfsa& model, EventId fault) {
  detail::check_legacy_scope(model, fault);
  std::vector<std::string> names;
  std::vector<LabelId> labels;
  std::vector<ProductEvent> events;
  std::vector<EventId> renumber(model.num_events(), kEpsilon);
  for (EventId e = 0; e < model.num_events(); ++e) {
    if (!model.observable(e)) continue;
    renumber[e] = static_cast<EventId>(names.size());
    names.push_back(model.event_name(e));
    labels.push_back(model.label(e));
    events.push_back({e, e, MoveKind::kSynchronized});
  }
  const std::size_t n = model.num_states();
  auto expand = [&](const TaggedState& s, auto emit) {
    // Unobservable closure over (state, fault seen).
    std::vector<std::array<bool, 2>> seen(n, {false, false});
    std::vector<std::pair<StateId, bool>> stack{{s.x1, false}};
    seen[s.x1][0] = true;
    while (!stack.empty()) {
      auto [q, f] = stack.back();
      stack.pop_back();
      for (auto i : model.out_edges(q)) {
        const Transition& t = model.transition(i);
        if (model.observable(t.event)) continue;
        const bool g = f || t.event == fault;
        if (!seen[t.to][g]) {
          seen[t.to][g] = true;
          stack.push_back({t.to, g});
        }
      }
    }
    for (StateId q = 0; q < n; ++q) {
      for (int f = 0; f < 2; ++f) {
        if (!seen[q][f]) continue;
        const bool faulty = f == 1 || s.l1 == FaultTag::kFaulty;
        for (auto i : model.out_edges(q)) {
          const Transition& t = model.transition(i);
          if (!model.observable(t.event)) continue;
          emit(renumber[t.event], TaggedState{t.to, faulty ? FaultTag::kFaulty : FaultTag::kPhi, t.to,
                                              faulty ? FaultTag::kFaulty : FaultTag::kPhi});
        }
      }
    }
  };
  const StateId x0 = *model.initial().begin();
  return detail::explore_tagged(model, {x0, FaultTag::kPhi, x0, FaultTag::kPhi}, names, labels, events,
                                detail::TaggedNaming::kSingle, expand);
}

/// TwPl = S_phi || S_phi.
inline TaggedProduct build_twin_plant(const Lfsa& model, EventId fault) {
  const TaggedProduct phi = build_s_phi(model, fault);
  const Lfsa& a = phi.automaton;
  std::vector<std::string> names = a.event_names();
  std::vector<LabelId> labels = a.event_labels();
  std::vector<ProductEvent> events = phi.events;
  // Successors of S_phi state by (event, target) keyed on (x, tag).
  std::map<std::pair<StateId, FaultTag>, StateId> where;
  for (StateId s = 0; s < phi.states.size(); ++s) where[{phi.states[s].x1, phi.states[s].l1}] = s;
  auto expand = [&](const TaggedState& s, auto emit) {
    const StateId left = where.at({s.x1, s.l1});
    const StateId right = where.at({s.x2, s.l2});
    for (auto i : a.out_edges(left)) {
      const Transition& t = a.transition(i);
      for (auto j : a.out_edges(right)) {
        const Transition& u = a.transition(j);
        if (u.event != t.event) continue;
        const TaggedState& l = phi.states[t.to];
        const TaggedState& r = phi.states[u.to];
        emit(t.event, TaggedState{l.x1, l.l1, r.x1, r.l1});
      }
    }
  };
  const TaggedState init = phi.states[a.initial().ids().front()];
  return detail::explore_tagged(model, {init.x1, init.l1, init.x1, init.l1}, names, labels, events,
                                detail::TaggedNaming::kPairOfPairs,
                                expand);
}

/// Ver_S with rules (i)-(vii).
inline TaggedProduct build_yl_verifier(const Lfsa& model, EventId fault) {
  detail::check_legacy_scope(model, fault);
  std::vector<ProductEvent> events;
  for (EventId e = 0; e < model.num_events(); ++e) {
    events.push_back({e, e, model.observable(e) ? MoveKind::kSynchronized : MoveKind::kLeftUnobservable});
  }
  auto expand = [&](const TaggedState& s, auto emit) {
    for (auto i : model.out_edges(s.x1)) {
      const Transition& t = model.transition(i);
      if (t.event == fault) {
        emit(fault, TaggedState{t.to, FaultTag::kFaulty, s.x2, s.l2});  // (i)
        for (auto j : model.out_edges(s.x2)) {
          const Transition& u = model.transition(j);
          if (u.event == fault) emit(fault, TaggedState{t.to, FaultTag::kFaulty, u.to, FaultTag::kFaulty});  // (iii)
        }
      } else if (!model.observable(t.event)) {
        emit(t.event, TaggedState{t.to, s.l1, s.x2, s.l2});  // (iv)
        for (auto j : model.out_edges(s.x2)) {
          const Transition& u = model.transition(j);
          if (u.event == t.event) emit(t.event, TaggedState{t.to, s.l1, u.to, s.l2});  // (vi)
        }
      } else {
        for (auto j : model.out_edges(s.x2)) {
          const Transition& u = model.transition(j);
          if (u.event == t.event) emit(t.event, TaggedState{t.to, s.l1, u.to, s.l2});  // (vii)
        }
      }
    }
    for (auto j : model.out_edges(s.x2)) {
      const Transition& u = model.transition(j);
      if (u.event == fault) {
        emit(fault, TaggedState{s.x1, s.l1, u.to, FaultTag::kFaulty});  // (ii)
      } else if (!model.observable(u.event)) {
        emit(u.event, TaggedState{s.x1, s.l1, u.to, s.l2});  // (v)
      }
    }
  };
  const StateId x0 = *model.initial().begin();
  return detail::explore_tagged(model, {x0, FaultTag::kNormal, x0, FaultTag::kNormal}, model.event_names(),
                                model.event_labels(), events, detail::TaggedNaming::kQuadruple, expand);
}

/// Generalized twin plant with rules (a)-(d). Event order follows the
/// concurrent composition: (o,o), then (e,eps), then (eps,e).
inline TaggedProduct build_generalized_twin_plant(const Lfsa& model, EventId fault) {
  detail::check_legacy_scope(model, fault);
  std::vector<std::string> names;
  std::vector<LabelId> labels;
  std::vector<ProductEvent> events;
  std::vector<EventId> sync(model.num_events(), kEpsilon), left(model.num_events(), kEpsilon),
      right(model.num_events(), kEpsilon);
  const std::string eps(kEpsilonText);
  for (EventId e = 0; e < model.num_events(); ++e) {
    if (!model.observable(e)) continue;
    sync[e] = static_cast<EventId>(names.size());
    names.push_back(pair_name(model.event_name(e), model.event_name(e)));
    labels.push_back(model.label(e));
    events.push_back({e, e, MoveKind::kSynchronized});
  }
  for (EventId e = 0; e < model.num_events(); ++e) {
    if (model.observable(e)) continue;
    left[e] = static_cast<EventId>(names.size());
    names.push_back(pair_name(model.event_name(e), eps));
    labels.push_back(kEpsilon);
    events.push_back({e, std::nullopt, MoveKind::kLeftUnobservable});
  }
  for (EventId e = 0; e < model.num_events(); ++e) {
    if (model.observable(e) || e == fault) continue;
    right[e] = static_cast<EventId>(names.size());
    names.push_back(pair_name(eps, model.event_name(e)));
    labels.push_back(kEpsilon);
    events.push_back({std::nullopt, e, MoveKind::kRightUnobservable});
  }
  auto expand = [&](const TaggedState& s, auto emit) {
    for (auto i : model.out_edges(s.x1)) {
      const Transition& t = model.transition(i);
      if (t.event == fault) {
        emit(left[t.event], TaggedState{t.to, FaultTag::kFaulty, s.x2, s.l2});  // (a)
      } else if (!model.observable(t.event)) {
        emit(left[t.event], TaggedState{t.to, s.l1, s.x2, s.l2});  // (b)
      } else {
        for (auto j : model.out_edges(s.x2)) {
          const Transition& u = model.transition(j);
          if (u.event == t.event) emit(sync[t.event], TaggedState{t.to, s.l1, u.to, s.l2});  // (d)
        }
      }
    }
    for (auto j : model.out_edges(s.x2)) {
      const Transition& u = model.transition(j);
      if (!model.observable(u.event) && u.event != fault) {
        emit(right[u.event], TaggedState{s.x1, s.l1, u.to, s.l2});  // (c)
      }
    }
  };
  const StateId x0 = *model.initial().begin();
  return detail::explore_tagged(model, {x0, FaultTag::kNormal, x0, FaultTag::kNormal}, names, labels, events,
                                detail::TaggedNaming::kQuadruple, expand);
}

/// Diagnosable iff every state on a cycle of TwPl has equal tags.
/// Sound only for live, divergence-free models.
inline LegacyVerdict check_diag_twin_plant(const Lfsa& model, EventId fault) {
  return detail::mixed_tag_cycle(build_twin_plant(model, fault));
}

/// The same criterion on Ver_S.
inline LegacyVerdict check_diag_yl_verifier(const Lfsa& model, EventId fault) {
  return detail::mixed_tag_cycle(build_yl_verifier(model, fault));
}

/// Not diagnosable iff a reachable cycle of (-,F,-,N) states has an
/// event with a left component.
inline LegacyVerdict check_diag_generalized_twin_plant(const Lfsa& model, EventId fault) {
  LegacyVerdict v;
  v.product = build_generalized_twin_plant(model, fault);
  const Lfsa& p = v.product.automaton;
  auto fn = [&](StateId s) {
    return v.product.states[s].l1 == FaultTag::kFaulty && v.product.states[s].l2 == FaultTag::kNormal;
  };
  // Restrict to the (F,N) subgraph: transitions leaving it join no component.
  auto inside = [&](const Transition& t) { return fn(t.from) && fn(t.to); };
  LfsaParts sub = p.parts();
  sub.transitions.clear();
  for (const Transition& t : p.transitions()) {
    if (inside(t)) sub.transitions.push_back(t);
  }
  const Lfsa restricted(std::move(sub));
  auto left_active = [&](const Transition& t) { return v.product.events[t.event].left.has_value(); };
  const SccPartition scc = scc_partition(restricted, left_active);
  for (StateId s = 0; s < p.num_states(); ++s) {
    if (!scc.on_marked_cycle(s)) continue;
    v.holds = false;
    // Translate the restricted cycle back to indices of the full product.
    for (auto i : cycle_through(restricted, scc, s, left_active)) {
      const Transition& t = restricted.transition(i);
      for (auto j : p.out_edges(t.from)) {
        if (p.transition(j) == t) {
          v.offending_cycle.push_back(j);
          break;
        }
      }
    }
    break;
  }
  return v;
}

}  // namespace desv
