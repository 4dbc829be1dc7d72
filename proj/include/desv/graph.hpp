#pragma once

// State estimates, reachability and strongly connected components.

#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "desv/lfsa.hpp"

namespace desv {

/// UR(x): least superset of x closed under unobservable transitions.
inline StateSet unobservable_reach(const Lfsa& model, const StateSet& x) {
  std::vector<bool> seen(model.num_states(), false);
  std::vector<StateId> stack;
  for (StateId q : x) {
    seen.at(q) = true;
    stack.push_back(q);
  }
  while (!stack.empty()) {
    StateId q = stack.back();
    stack.pop_back();
    for (auto i : model.out_edges(q)) {
      const Transition& t = model.transition(i);
      if (!model.observable(t.event) && !seen[t.to]) {
        seen[t.to] = true;
        stack.push_back(t.to);
      }
    }
  }
  return StateSet::from_mask(seen);
}

/// One observer step: every observable event labelled `a`, then UR.
inline StateSet estimate_step(const Lfsa& model, const StateSet& x, LabelId a) {
  const auto labels = model.observable_labels();
  if (!std::binary_search(labels.begin(), labels.end(), a)) {
    throw ModelError("'" + (a < model.num_outputs() ? model.output_name(a) : std::string("?")) +
                     "' is not the label of an observable event");
  }
  std::vector<StateId> next;
  for (StateId q : x) {
    for (auto i : model.out_edges(q)) {
      const Transition& t = model.transition(i);
      if (model.label(t.event) == a) next.push_back(t.to);
    }
  }
  return unobservable_reach(model, StateSet(std::move(next)));
}

/// M(S, sigma).
inline StateSet current_state_estimate(const Lfsa& model, std::span<const LabelId> sigma) {
  StateSet x = unobservable_reach(model, model.initial());
  for (LabelId a : sigma) {
    if (a >= model.num_outputs()) throw ModelError("observation symbol outside the output alphabet");
    // Declared outputs that no event carries lead to the empty estimate.
    const auto labels = model.observable_labels();
    if (!std::binary_search(labels.begin(), labels.end(), a)) return {};
    x = estimate_step(model, x, a);
  }
  return x;
}

inline StateSet current_state_estimate(const Lfsa& model, const std::vector<std::string>& sigma) {
  std::vector<LabelId> ids;
  for (const auto& s : sigma) {
    auto a = model.find_output(s);
    if (!a) throw ModelError("observation symbol '" + s + "' is not in the output alphabet");
    ids.push_back(*a);
  }
  return current_state_estimate(model, ids);
}

enum class Reach { kProper, kReflexive };

/// States reachable from `seeds` by at least one transition; kReflexive adds
/// the seeds themselves.
inline StateSet reachable(const Lfsa& model, const StateSet& seeds, Reach mode) {
  std::vector<bool> seen(model.num_states(), false);
  std::vector<StateId> stack;
  auto push_successors = [&](StateId q) {
    for (auto i : model.out_edges(q)) {
      StateId r = model.transition(i).to;
      if (!seen[r]) {
        seen[r] = true;
        stack.push_back(r);
      }
    }
  };
  for (StateId q : seeds) push_successors(q);
  while (!stack.empty()) {
    StateId q = stack.back();
    stack.pop_back();
    push_successors(q);
  }
  if (mode == Reach::kReflexive) {
    for (StateId q : seeds) seen[q] = true;
  }
  return StateSet::from_mask(seen);
}

/// States that can reach `targets` by zero or more transitions.
inline std::vector<bool> coreachable(const Lfsa& model, const std::vector<bool>& targets) {
  std::vector<bool> seen = targets;
  std::vector<StateId> stack;
  for (StateId q = 0; q < seen.size(); ++q) {
    if (seen[q]) stack.push_back(q);
  }
  while (!stack.empty()) {
    StateId q = stack.back();
    stack.pop_back();
    for (auto i : model.in_edges(q)) {
      StateId p = model.transition(i).from;
      if (!seen[p]) {
        seen[p] = true;
        stack.push_back(p);
      }
    }
  }
  return seen;
}

/// Iterative Tarjan over vertices 0..n-1. Components come out in reverse
/// topological order.
inline std::vector<std::vector<std::uint32_t>> tarjan_scc(
    std::size_t n, const std::function<void(std::uint32_t, std::vector<std::uint32_t>&)>& successors) {
  constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<std::uint32_t>> components;
  std::uint32_t counter = 0;

  struct Frame {
    std::uint32_t v;
    std::vector<std::uint32_t> succ;
    std::size_t next;
  };
  std::vector<Frame> call;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    auto open = [&](std::uint32_t v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      Frame f{v, {}, 0};
      successors(v, f.succ);
      call.push_back(std::move(f));
    };
    open(root);
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < f.succ.size()) {
        std::uint32_t w = f.succ[f.next++];
        if (index[w] == kUnvisited) {
          open(w);
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      std::uint32_t v = f.v;
      if (low[v] == index[v]) {
        std::vector<std::uint32_t> comp;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) {
        std::uint32_t parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return components;
}

struct SccPartition {
  std::vector<std::vector<StateId>> components;
  std::vector<std::uint32_t> component_of;
  /// Nontrivial component or a self-loop.
  std::vector<bool> has_cycle;
  /// Some transition inside the component satisfies the marking predicate
  /// (by default: carries a non-epsilon label).
  std::vector<bool> has_marked_cycle;

  bool on_cycle(StateId q) const { return has_cycle[component_of[q]]; }
  bool on_marked_cycle(StateId q) const { return has_marked_cycle[component_of[q]]; }
};

inline SccPartition scc_partition(const Lfsa& model,
                                  const std::function<bool(const Transition&)>& marked) {
  SccPartition out;
  out.components = tarjan_scc(model.num_states(), [&](std::uint32_t v, std::vector<std::uint32_t>& succ) {
    for (auto i : model.out_edges(v)) succ.push_back(model.transition(i).to);
  });
  std::sort(out.components.begin(), out.components.end());
  out.component_of.assign(model.num_states(), 0);
  for (std::uint32_t c = 0; c < out.components.size(); ++c) {
    for (StateId q : out.components[c]) out.component_of[q] = c;
  }
  out.has_cycle.assign(out.components.size(), false);
  out.has_marked_cycle.assign(out.components.size(), false);
  for (std::uint32_t c = 0; c < out.components.size(); ++c) {
    if (out.components[c].size() > 1) out.has_cycle[c] = true;
  }
  for (const Transition& t : model.transitions()) {
    if (out.component_of[t.from] != out.component_of[t.to]) continue;
    const auto c = out.component_of[t.from];
    out.has_cycle[c] = true;
    if (marked(t)) out.has_marked_cycle[c] = true;
  }
  return out;
}

inline SccPartition scc_partition(const Lfsa& model) {
  return scc_partition(model, [&](const Transition& t) { return model.observable(t.event); });
}

/// Per state: does an infinite run start here (equivalently, is a state on a
/// transition cycle reachable by one or more transitions)?
inline std::vector<bool> infinite_run_states(const Lfsa& model, const SccPartition& scc) {
  std::vector<bool> on_cycle(model.num_states(), false);
  for (StateId q = 0; q < model.num_states(); ++q) on_cycle[q] = scc.on_cycle(q);
  return coreachable(model, on_cycle);
}

inline std::vector<bool> infinite_run_states(const Lfsa& model) {
  return infinite_run_states(model, scc_partition(model));
}

inline bool can_reach_cycle(const Lfsa& model, StateId q) {
  if (q >= model.num_states()) throw ModelError("state out of range");
  return infinite_run_states(model)[q];
}

/// Breadth-first shortest path (as transition indices) from any of `sources`
/// to a state satisfying `goal`, using only transitions accepted by `allowed`.
/// A source that satisfies `goal` yields an empty path. Returns the path and
/// the source it starts from.
struct PathResult {
  StateId source = 0;
  StateId target = 0;
  std::vector<std::uint32_t> transitions;
};

inline std::optional<PathResult> shortest_path(
    const Lfsa& model, std::span<const StateId> sources, const std::function<bool(StateId)>& goal,
    const std::function<bool(const Transition&)>& allowed = nullptr) {
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> via(model.num_states(), kNone);
  std::vector<StateId> origin(model.num_states(), 0);
  std::vector<bool> seen(model.num_states(), false);
  std::deque<StateId> queue;
  for (StateId s : sources) {
    if (seen[s]) continue;
    seen[s] = true;
    origin[s] = s;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    StateId q = queue.front();
    queue.pop_front();
    if (goal(q)) {
      PathResult result;
      result.source = origin[q];
      result.target = q;
      for (StateId cur = q; via[cur] != kNone; cur = model.transition(via[cur]).from) {
        result.transitions.push_back(via[cur]);
      }
      std::reverse(result.transitions.begin(), result.transitions.end());
      return result;
    }
    for (auto i : model.out_edges(q)) {
      const Transition& t = model.transition(i);
      if (seen[t.to] || (allowed && !allowed(t))) continue;
      seen[t.to] = true;
      via[t.to] = i;
      origin[t.to] = origin[q];
      queue.push_back(t.to);
    }
  }
  return std::nullopt;
}

/// A cycle through `q` staying inside its component and containing at least
/// one transition that satisfies `marked` (any transition when `marked` is
/// empty). Requires that such a cycle exists.
inline std::vector<std::uint32_t> cycle_through(const Lfsa& model, const SccPartition& scc, StateId q,
                                                const std::function<bool(const Transition&)>& marked) {
  const auto comp = scc.component_of[q];
  auto inside = [&](const Transition& t) {
    return scc.component_of[t.from] == comp && scc.component_of[t.to] == comp;
  };
  std::optional<std::uint32_t> pivot;
  for (StateId p : scc.components[comp]) {
    for (auto i : model.out_edges(p)) {
      const Transition& t = model.transition(i);
      if (inside(t) && (!marked || marked(t))) {
        pivot = i;
        break;
      }
    }
    if (pivot) break;
  }
  if (!pivot) throw std::logic_error("no qualifying cycle through the requested state");
  const Transition& edge = model.transition(*pivot);
  const StateId start[] = {q};
  auto to_pivot = shortest_path(model, start, [&](StateId s) { return s == edge.from; }, inside);
  const StateId after[] = {edge.to};
  auto back = shortest_path(model, after, [&](StateId s) { return s == q; }, inside);
  std::vector<std::uint32_t> cycle = to_pivot->transitions;
  cycle.push_back(*pivot);
  cycle.insert(cycle.end(), back->transitions.begin(), back->transitions.end());
  return cycle;
}

}  // namespace desv
