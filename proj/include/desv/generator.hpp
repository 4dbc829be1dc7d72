#pragma once

// Seeded random models for property testing. Sampling uses raw 64-bit draws
// from mt19937_64 (whose output is fixed by the standard) rather than the
// library distributions, so a seed gives the same model on every platform.

#include <random>
#include <string>
#include <vector>

#include "desv/graph.hpp"
#include "desv/lfsa.hpp"

namespace desv {

struct GeneratorParams {
  std::size_t states = 4;
  std::size_t events = 3;
  std::size_t outputs = 0;  // 0: about half the event count
  double observable_fraction = 0.6;
  double transition_density = 0.35;
  std::size_t initial_count = 1;
  double secret_density = 0.3;
  double fault_density = 0.3;
  bool live = false;
  bool divergence_free = false;
  /// Identity labels on observable events, one initial state and exactly one
  /// unobservable fault event named "f".
  bool in_scope = false;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 64;
};

struct GeneratedModel {
  Lfsa model;
  FaultSpec faults;
  SecretSpec secrets;
};

class GeneratorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

 private:
  std::mt19937_64 engine_;
};

inline std::string output_symbol(std::size_t i) {
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('a' + i % 26));
    i /= 26;
  } while (i-- > 0);
  return s;
}

inline bool reachable_live(const Lfsa& m) {
  for (StateId q : reachable(m, m.initial(), Reach::kReflexive)) {
    if (m.out_edges(q).empty()) return false;
  }
  return true;
}

/// Indices of unobservable transitions lying inside an unobservable SCC.
inline std::vector<bool> unobservable_cycle_edges(const Lfsa& m) {
  auto comps = tarjan_scc(m.num_states(), [&](std::uint32_t v, std::vector<std::uint32_t>& succ) {
    for (auto i : m.out_edges(v)) {
      if (!m.observable(m.transition(i).event)) succ.push_back(m.transition(i).to);
    }
  });
  std::vector<std::uint32_t> comp_of(m.num_states(), 0);
  for (std::uint32_t c = 0; c < comps.size(); ++c) {
    for (auto q : comps[c]) comp_of[q] = c;
  }
  const auto all = m.transitions();
  std::vector<bool> out(all.size(), false);
  for (std::size_t i = 0; i < all.size(); ++i) {
    out[i] = !m.observable(all[i].event) && comp_of[all[i].from] == comp_of[all[i].to];
  }
  return out;
}

inline bool divergence_free(const Lfsa& m) {
  const auto reach = reachable(m, m.initial(), Reach::kReflexive).to_mask(m.num_states());
  const auto bad = unobservable_cycle_edges(m);
  const auto all = m.transitions();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (bad[i] && reach[all[i].from]) return false;
  }
  return true;
}

inline std::optional<GeneratedModel> attempt(const GeneratorParams& p, Draw& draw) {
  LfsaParts parts;
  std::vector<EventId> faults;
  for (std::size_t q = 0; q < p.states; ++q) parts.state_names.push_back("q" + std::to_string(q));

  std::vector<bool> observable(p.events, false);
  if (p.in_scope) {
    // e0 is the fault; the rest are observable by chance and named after
    // their own label.
    for (std::size_t e = 1; e < p.events; ++e) observable[e] = draw.chance(p.observable_fraction);
    for (std::size_t e = 0; e < p.events; ++e) {
      if (e == 0) {
        parts.event_names.push_back("f");
        parts.event_labels.push_back(kEpsilon);
      } else if (observable[e]) {
        parts.event_names.push_back(output_symbol(parts.output_names.size()));
        parts.event_labels.push_back(static_cast<LabelId>(parts.output_names.size()));
        parts.output_names.push_back(parts.event_names.back());
      } else {
        parts.event_names.push_back("u" + std::to_string(e));
        parts.event_labels.push_back(kEpsilon);
      }
    }
    faults.push_back(0);
  } else {
    const std::size_t outputs = p.outputs ? p.outputs : std::max<std::size_t>(1, (p.events + 1) / 2);
    for (std::size_t a = 0; a < outputs; ++a) parts.output_names.push_back(output_symbol(a));
    for (std::size_t e = 0; e < p.events; ++e) {
      parts.event_names.push_back("e" + std::to_string(e));
      observable[e] = draw.chance(p.observable_fraction);
      parts.event_labels.push_back(observable[e] ? static_cast<LabelId>(draw.below(outputs)) : kEpsilon);
      if (draw.chance(p.fault_density)) faults.push_back(static_cast<EventId>(e));
    }
  }

  for (StateId q = 0; q < p.states; ++q) {
    for (EventId e = 0; e < p.events; ++e) {
      if (draw.chance(p.transition_density)) parts.transitions.push_back({q, e, static_cast<StateId>(draw.below(p.states))});
      if (draw.chance(p.transition_density / 4)) {
        parts.transitions.push_back({q, e, static_cast<StateId>(draw.below(p.states))});
      }
    }
  }
  const std::size_t initial = p.in_scope ? 1 : std::clamp<std::size_t>(p.initial_count, 1, p.states);
  std::vector<StateId> pool(p.states);
  for (StateId q = 0; q < p.states; ++q) pool[q] = q;
  for (std::size_t i = 0; i < initial; ++i) {
    const std::size_t j = i + draw.below(p.states - i);
    std::swap(pool[i], pool[j]);
    parts.initial.push_back(pool[i]);
  }
  std::vector<StateId> secret;
  for (StateId q = 0; q < p.states; ++q) {
    if (draw.chance(p.secret_density)) secret.push_back(q);
  }

  Lfsa model(parts);
  if (p.divergence_free) {
    const auto bad = unobservable_cycle_edges(model);
    LfsaParts kept = model.parts();
    kept.transitions.clear();
    const auto all = model.transitions();
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (!bad[i]) kept.transitions.push_back(all[i]);
    }
    model = Lfsa(std::move(kept));
  }
  if (p.live) {
    std::vector<EventId> pickable;
    for (EventId e = 0; e < p.events; ++e) {
      if (!p.divergence_free || observable[e]) pickable.push_back(e);
    }
    if (pickable.empty()) return std::nullopt;
    LfsaParts repaired = model.parts();
    for (StateId q = 0; q < p.states; ++q) {
      if (!model.out_edges(q).empty()) continue;
      repaired.transitions.push_back(
          {q, pickable[draw.below(pickable.size())], static_cast<StateId>(draw.below(p.states))});
    }
    model = Lfsa(std::move(repaired));
  }
  if (p.live && !reachable_live(model)) return std::nullopt;
  if (p.divergence_free && !divergence_free(model)) return std::nullopt;
  return GeneratedModel{std::move(model), FaultSpec{faults}, SecretSpec{StateSet(secret)}};
}

}  // namespace detail

inline GeneratedModel random_lfsa(const GeneratorParams& p) {
  if (p.states == 0) throw GeneratorError("a model needs at least one state");
  if (p.in_scope && p.events == 0) throw GeneratorError("in-scope models need the fault event");
  for (double f : {p.observable_fraction, p.transition_density, p.secret_density, p.fault_density}) {
    if (!(f >= 0.0 && f <= 1.0)) throw GeneratorError("fractions must lie in [0, 1]");
  }
  detail::Draw draw(p.seed);
  for (std::size_t i = 0; i < std::max<std::size_t>(1, p.max_attempts); ++i) {
    if (auto m = detail::attempt(p, draw)) return std::move(*m);
  }
  throw GeneratorError("constraints not satisfied after " + std::to_string(p.max_attempts) + " attempts");
}

}  // namespace desv
