#pragma once

// Concurrent composition: observable transitions with equal labels
// synchronize, unobservable transitions interleave.

#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "desv/lfsa.hpp"

namespace desv {

inline constexpr std::string_view kEpsilonText = "ε";

struct ProductState {
  StateId left = 0;
  StateId right = 0;

  friend auto operator<=>(const ProductState&, const ProductState&) = default;
};

enum class MoveKind { kSynchronized, kLeftUnobservable, kRightUnobservable };

struct ProductEvent {
  std::optional<EventId> left;
  std::optional<EventId> right;
  MoveKind kind = MoveKind::kSynchronized;
};

/// CC(A, B) restricted to its reachable part, itself an Lfsa so every graph
/// primitive applies. `states[i]` / `events[e]` give the components of the
/// product state i / product event e.
struct ProductAutomaton {
  Lfsa automaton;
  std::vector<ProductState> states;
  std::vector<ProductEvent> events;

  std::optional<StateId> find(ProductState s) const {
    for (StateId i = 0; i < states.size(); ++i) {
      if (states[i] == s) return i;
    }
    return std::nullopt;
  }
};

inline std::string pair_name(const std::string& left, const std::string& right) {
  return "(" + left + "," + right + ")";
}

/// CC(A, B) explored from the given state pairs instead of Q01 x Q02.
inline ProductAutomaton concurrent_composition(const Lfsa& a, const Lfsa& b, const std::vector<ProductState>& roots) {
  if (a.output_names() != b.output_names()) {
    throw ModelError("concurrent composition requires identical output alphabets");
  }
  ProductAutomaton product;
  LfsaParts parts;
  parts.output_names = a.output_names();

  // E' in canonical order: synchronized pairs, then (e, eps), then (eps, e).
  std::vector<std::uint32_t> sync_id(a.num_events() * b.num_events(), kEpsilon);
  std::vector<std::uint32_t> left_id(a.num_events(), kEpsilon), right_id(b.num_events(), kEpsilon);
  auto add_event = [&](ProductEvent ev, LabelId label) {
    const std::string l = ev.left ? a.event_name(*ev.left) : std::string(kEpsilonText);
    const std::string r = ev.right ? b.event_name(*ev.right) : std::string(kEpsilonText);
    parts.event_names.push_back(pair_name(l, r));
    parts.event_labels.push_back(label);
    product.events.push_back(ev);
    return static_cast<std::uint32_t>(product.events.size() - 1);
  };
  for (EventId e = 0; e < a.num_events(); ++e) {
    if (!a.observable(e)) continue;
    for (EventId f = 0; f < b.num_events(); ++f) {
      if (b.observable(f) && a.label(e) == b.label(f)) {
        sync_id[e * b.num_events() + f] = add_event({e, f, MoveKind::kSynchronized}, a.label(e));
      }
    }
  }
  for (EventId e = 0; e < a.num_events(); ++e) {
    if (!a.observable(e)) left_id[e] = add_event({e, std::nullopt, MoveKind::kLeftUnobservable}, kEpsilon);
  }
  for (EventId f = 0; f < b.num_events(); ++f) {
    if (!b.observable(f)) right_id[f] = add_event({std::nullopt, f, MoveKind::kRightUnobservable}, kEpsilon);
  }

  std::unordered_map<std::uint64_t, StateId> index;
  std::deque<StateId> frontier;
  auto intern = [&](ProductState s) {
    const std::uint64_t key = (static_cast<std::uint64_t>(s.left) << 32) | s.right;
    auto [it, inserted] = index.emplace(key, static_cast<StateId>(product.states.size()));
    if (inserted) {
      product.states.push_back(s);
      parts.state_names.push_back(pair_name(a.state_name(s.left), b.state_name(s.right)));
      frontier.push_back(it->second);
    }
    return it->second;
  };
  for (const ProductState& s : roots) {
    if (s.left >= a.num_states() || s.right >= b.num_states()) throw ModelError("root pair out of range");
    parts.initial.push_back(intern(s));
  }
  while (!frontier.empty()) {
    const StateId id = frontier.front();
    frontier.pop_front();
    const ProductState s = product.states[id];
    for (auto i : a.out_edges(s.left)) {
      const Transition& t = a.transition(i);
      if (a.observable(t.event)) {
        for (auto j : b.out_edges(s.right)) {
          const Transition& u = b.transition(j);
          if (b.observable(u.event) && b.label(u.event) == a.label(t.event)) {
            const StateId to = intern({t.to, u.to});
            parts.transitions.push_back({id, sync_id[t.event * b.num_events() + u.event], to});
          }
        }
      } else {
        const StateId to = intern({t.to, s.right});
        parts.transitions.push_back({id, left_id[t.event], to});
      }
    }
    for (auto j : b.out_edges(s.right)) {
      const Transition& u = b.transition(j);
      if (!b.observable(u.event)) {
        const StateId to = intern({s.left, u.to});
        parts.transitions.push_back({id, right_id[u.event], to});
      }
    }
  }
  product.automaton = Lfsa(std::move(parts));
  return product;
}

inline ProductAutomaton concurrent_composition(const Lfsa& a, const Lfsa& b) {
  std::vector<ProductState> roots;
  for (StateId p : a.initial()) {
    for (StateId r : b.initial()) roots.push_back({p, r});
  }
  return concurrent_composition(a, b, roots);
}

inline ProductAutomaton self_composition(const Lfsa& a) { return concurrent_composition(a, a); }

/// Result of a seeded exploration of CC(plant, det) where `det` is
/// deterministic over labels and never moves on its own. Every entry keeps
/// its minimal observable depth and a parent link for path reconstruction.
struct SeededReach {
  std::vector<ProductState> states;
  std::vector<std::uint64_t> depth;
  std::vector<std::optional<std::uint32_t>> parent;
  std::vector<std::optional<Transition>> via;  // plant transition taken from the parent
  std::vector<std::uint32_t> seed_of;          // index into the seed list
  std::size_t moves = 0;                       // product transitions explored

  /// Plant transitions leading from the seed to entry `i`.
  std::vector<Transition> path_to(std::uint32_t i) const {
    std::vector<Transition> out;
    for (auto cur = std::optional<std::uint32_t>(i); parent[*cur]; cur = parent[*cur]) {
      out.push_back(*via[*cur]);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }
};

/// Breadth-first closure from the seeds: a label move (a, a) advances both
/// sides and costs one unit of depth, an unobservable plant move advances only
/// the left side for free. Entries deeper than `depth_cap` are not explored.
inline SeededReach seeded_product_reach(const Lfsa& plant, const Lfsa& det,
                                        const std::vector<ProductState>& seeds,
                                        std::optional<std::uint64_t> depth_cap) {
  if (plant.output_names() != det.output_names()) {
    throw ModelError("seeded product requires identical output alphabets");
  }
  // det successor table by label.
  constexpr StateId kNone = std::numeric_limits<StateId>::max();
  std::vector<std::vector<StateId>> next(det.num_states(), std::vector<StateId>(det.num_outputs(), kNone));
  for (const Transition& t : det.transitions()) {
    if (!det.observable(t.event)) throw ModelError("deterministic operand has an unobservable transition");
    StateId& slot = next[t.from][det.label(t.event)];
    if (slot != kNone && slot != t.to) throw ModelError("right operand is not deterministic");
    slot = t.to;
  }

  SeededReach out;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  std::deque<std::uint32_t> queue;
  auto key = [](ProductState s) { return (static_cast<std::uint64_t>(s.left) << 32) | s.right; };
  for (std::uint32_t k = 0; k < seeds.size(); ++k) {
    const ProductState s = seeds[k];
    if (s.left >= plant.num_states() || s.right >= det.num_states()) throw ModelError("seed out of range");
    if (index.emplace(key(s), static_cast<std::uint32_t>(out.states.size())).second) {
      out.states.push_back(s);
      out.depth.push_back(0);
      out.parent.emplace_back();
      out.via.emplace_back();
      out.seed_of.push_back(k);
      queue.push_back(static_cast<std::uint32_t>(out.states.size() - 1));
    }
  }
  // 0-1 BFS: free moves go to the front, so every entry is settled at its
  // minimal depth before its successors are expanded.
  std::vector<bool> settled;
  while (!queue.empty()) {
    const std::uint32_t id = queue.front();
    queue.pop_front();
    settled.resize(out.states.size(), false);
    if (settled[id]) continue;
    settled[id] = true;
    const ProductState s = out.states[id];
    const std::uint64_t d = out.depth[id];
    for (auto i : plant.out_edges(s.left)) {
      const Transition& t = plant.transition(i);
      ProductState target{t.to, s.right};
      std::uint64_t nd = d;
      if (plant.observable(t.event)) {
        target.right = next[s.right][plant.label(t.event)];
        if (target.right == kNone) continue;
        nd = d + 1;
        if (depth_cap && nd > *depth_cap) continue;
      }
      ++out.moves;
      auto [it, inserted] = index.emplace(key(target), static_cast<std::uint32_t>(out.states.size()));
      if (inserted) {
        out.states.push_back(target);
        out.depth.push_back(nd);
        out.parent.emplace_back(id);
        out.via.emplace_back(t);
        out.seed_of.push_back(out.seed_of[id]);
      } else if (nd < out.depth[it->second] && !(it->second < settled.size() && settled[it->second])) {
        out.depth[it->second] = nd;
        out.parent[it->second] = id;
        out.via[it->second] = t;
        out.seed_of[it->second] = out.seed_of[id];
      } else {
        continue;
      }
      if (nd == d) {
        queue.push_front(it->second);
      } else {
        queue.push_back(it->second);
      }
    }
  }
  return out;
}

inline SeededReach seeded_product_reach(const Lfsa& plant, const Lfsa& det, ProductState seed,
                                        std::optional<std::uint64_t> depth_cap) {
  return seeded_product_reach(plant, det, std::vector<ProductState>{seed}, depth_cap);
}

}  // namespace desv
