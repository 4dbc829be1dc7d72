#pragma once

// Standard and strong state-based opacity. Standard variants run on the
// observer and CC(S_eps, S_obs^eps); strong variants on CC(S_eps, S_dssobs^eps).

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "desv/composition.hpp"
#include "desv/derivations.hpp"
#include "desv/graph.hpp"
#include "desv/property.hpp"

namespace desv {

struct OpacityQuery {
  Property variant = Property::kCurrentStateOpacity;
  SecretSpec secrets;
  std::optional<std::uint64_t> k;
};

/// The K actually explored. K is a positive integer, so the corollary bound
/// min{K, 2^n - 2} is kept at 1 or more; n counts all states for KSO and the
/// non-secret states for SKSO.
inline std::uint64_t effective_k(const Lfsa& model, const OpacityQuery& q) {
  if (!q.k) throw QueryError("no K given");
  std::size_t n = model.num_states();
  if (q.variant == Property::kStrongKStepOpacity) n -= q.secrets.secret.size();
  std::uint64_t bound = n >= 63 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << n);
  bound = bound >= 3 ? bound - 2 : 1;
  return std::min(*q.k, bound);
}

namespace detail {

inline void check_query(const Lfsa& model, const OpacityQuery& q, bool strong) {
  if (is_inference(q.variant) || is_strong_opacity(q.variant) != strong) {
    throw QueryError(std::string("'") + std::string(property_name(q.variant)) +
                     "' is not handled by this check");
  }
  for (StateId s : q.secrets.secret) {
    if (s >= model.num_states()) throw QueryError("secret state out of range");
  }
  if (needs_k(q.variant) && !q.k) throw QueryError("K is required");
  if (!needs_k(q.variant) && q.k) throw QueryError("K is only meaningful for K-step variants");
  if (q.k && *q.k < 1) throw QueryError("K must be positive");
}

/// Lexicographically least shortest word reaching each observer state.
inline std::vector<std::vector<LabelId>> observer_words(const ObserverAutomaton& obs) {
  std::vector<std::optional<std::vector<LabelId>>> word(obs.states.size());
  std::deque<std::uint32_t> queue{obs.initial};
  word[obs.initial] = std::vector<LabelId>{};
  while (!queue.empty()) {
    const std::uint32_t x = queue.front();
    queue.pop_front();
    for (std::size_t i = 0; i < obs.alphabet.size(); ++i) {
      const std::uint32_t y = obs.delta[x][i];
      if (word[y]) continue;
      word[y] = *word[x];
      word[y]->push_back(obs.alphabet[i]);
      queue.push_back(y);
    }
  }
  std::vector<std::vector<LabelId>> out;
  for (auto& w : word) out.push_back(w.value_or(std::vector<LabelId>{}));
  return out;
}

inline std::vector<LabelId> observation_of(const Lfsa& model, const std::vector<Transition>& run) {
  std::vector<LabelId> out;
  for (const Transition& t : run) {
    if (model.observable(t.event)) out.push_back(model.label(t.event));
  }
  return out;
}

/// Entry with empty right component (and left accepted by `want`) of least
/// depth, ties broken by observation order then entry order.
inline std::optional<std::uint32_t> best_empty(const Lfsa& plant, const SeededReach& reach,
                                               std::optional<std::uint32_t> empty_id,
                                               const std::function<bool(StateId)>& want = nullptr) {
  if (!empty_id) return std::nullopt;
  std::optional<std::uint32_t> best;
  std::vector<LabelId> best_obs;
  for (std::uint32_t i = 0; i < reach.states.size(); ++i) {
    if (reach.states[i].right != *empty_id || (want && !want(reach.states[i].left))) continue;
    auto obs = observation_of(plant, reach.path_to(i));
    if (!best || reach.depth[i] < reach.depth[*best] ||
        (reach.depth[i] == reach.depth[*best] && obs < best_obs)) {
      best = i;
      best_obs = std::move(obs);
    }
  }
  return best;
}

inline OpacityVerdict finish(OpacityVerdict v, std::vector<LabelId> observation, std::size_t split,
                             StateId secret, std::optional<StateId> left, StateSet estimate) {
  v.holds = false;
  v.witness = OpacityWitness{std::move(observation), split, secret, left, std::move(estimate)};
  return v;
}

}  // namespace detail

/// CSO, ISO, InfSO and KSO.
inline OpacityVerdict check_standard_opacity(const Lfsa& model, const OpacityQuery& query) {
  detail::check_query(model, query, false);
  const StateSet& secret = query.secrets.secret;
  OpacityVerdict verdict;
  verdict.property = query.variant;
  if (needs_k(query.variant)) verdict.effective_k = effective_k(model, query);

  if (query.variant == Property::kInitialStateOpacity) {
    const StateSet secret_init = model.initial().intersect(secret);
    if (secret_init.empty()) return verdict;
    const StateSet rest = model.initial().minus(secret);
    if (rest.empty()) return detail::finish(verdict, {}, 0, *secret_init.begin(), *secret_init.begin(), {});
    const ObserverAutomaton obs = build_observer(model, {unobservable_reach(model, rest)});
    const Lfsa lifted = lift_observer(obs);
    std::vector<ProductState> seeds;
    for (StateId q0 : secret_init) seeds.push_back({q0, obs.initial});
    const SeededReach reach = seeded_product_reach(model, lifted, seeds, std::nullopt);
    verdict.stats.observer_states = obs.states.size();
    verdict.stats.product_states = reach.states.size();
    verdict.stats.product_transitions = reach.moves;
    auto hit = detail::best_empty(model, reach, obs.empty_state());
    if (!hit) return verdict;
    return detail::finish(verdict, detail::observation_of(model, reach.path_to(*hit)), 0,
                          seeds[reach.seed_of[*hit]].left, reach.states[*hit].left, {});
  }

  // Current-state condition, shared by CSO, InfSO and KSO.
  const ObserverAutomaton obs = build_observer(model);
  verdict.stats.observer_states = obs.states.size();
  const auto words = detail::observer_words(obs);
  {
    std::optional<std::uint32_t> bad;
    for (std::uint32_t x = 0; x < obs.states.size(); ++x) {
      const StateSet& set = obs.states[x];
      if (set.empty() || !set.is_subset_of(secret)) continue;
      if (!bad || words[x].size() < words[*bad].size() ||
          (words[x].size() == words[*bad].size() && words[x] < words[*bad])) {
        bad = x;
      }
    }
    if (bad) {
      const StateSet& x = obs.states[*bad];
      return detail::finish(verdict, words[*bad], words[*bad].size(), *x.begin(), *x.begin(), {});
    }
  }
  if (query.variant == Property::kCurrentStateOpacity) return verdict;

  // Seeds (q, UR(x \ Q_S)) for every reachable x and q in x with q secret.
  struct Seed {
    StateId q;
    StateSet right;
    std::uint32_t origin;  // observer state x
  };
  std::vector<Seed> seeds;
  std::vector<StateSet> roots{obs.states[obs.initial]};
  for (std::uint32_t x = 0; x < obs.states.size(); ++x) {
    const StateSet& set = obs.states[x];
    const StateSet rest = unobservable_reach(model, set.minus(secret));
    for (StateId q : set.intersect(secret)) seeds.push_back({q, rest, x});
    if (!set.intersect(secret).empty()) roots.push_back(rest);
  }
  if (seeds.empty()) return verdict;
  const ObserverAutomaton ext = build_observer(model, roots);
  const Lfsa lifted = lift_observer(ext);
  const auto empty_id = ext.empty_state();
  std::optional<std::uint64_t> cap;
  if (verdict.effective_k) cap = *verdict.effective_k;

  std::vector<ProductState> product_seeds;
  for (const Seed& s : seeds) product_seeds.push_back({s.q, *ext.find(s.right)});
  const SeededReach all = seeded_product_reach(model, lifted, product_seeds, cap);
  verdict.stats.product_states = all.states.size();
  verdict.stats.product_transitions = all.moves;
  if (!detail::best_empty(model, all, empty_id)) return verdict;

  // Violated: pick the seed giving the shortest total observation.
  std::optional<std::vector<LabelId>> best_obs;
  std::size_t best_split = 0;
  StateId best_secret = 0, best_left = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const SeededReach one = seeded_product_reach(model, lifted, product_seeds[i], cap);
    auto hit = detail::best_empty(model, one, empty_id);
    if (!hit) continue;
    std::vector<LabelId> obs_word = words[seeds[i].origin];
    const std::size_t split = obs_word.size();
    for (LabelId a : detail::observation_of(model, one.path_to(*hit))) obs_word.push_back(a);
    if (!best_obs || obs_word.size() < best_obs->size() ||
        (obs_word.size() == best_obs->size() && obs_word < *best_obs)) {
      best_obs = std::move(obs_word);
      best_split = split;
      best_secret = seeds[i].q;
      best_left = one.states[*hit].left;
    }
  }
  return detail::finish(verdict, *best_obs, best_split, best_secret, best_left, {});
}

/// SCSO, SISO, SInfSO and SKSO.
inline OpacityVerdict check_strong_opacity(const Lfsa& model, const OpacityQuery& query) {
  detail::check_query(model, query, true);
  const StateSet& secret = query.secrets.secret;
  OpacityVerdict verdict;
  verdict.property = query.variant;
  if (needs_k(query.variant)) verdict.effective_k = effective_k(model, query);

  const SubautomatonReport dss = delete_secret(model, query.secrets);
  const ObserverAutomaton obs = build_observer(dss.automaton);
  const Lfsa lifted = lift_observer(obs);
  const auto empty_id = obs.empty_state();
  verdict.stats.observer_states = obs.states.size();
  auto is_secret = [&](StateId q) { return secret.contains(q); };

  if (query.variant == Property::kStrongInitialStateOpacity) {
    const StateSet secret_init = model.initial().intersect(secret);
    if (secret_init.empty()) return verdict;
    if (model.initial().is_subset_of(secret)) {
      return detail::finish(verdict, {}, 0, *secret_init.begin(), *secret_init.begin(), {});
    }
    std::vector<ProductState> seeds;
    for (StateId q0 : secret_init) seeds.push_back({q0, obs.initial});
    const SeededReach reach = seeded_product_reach(model, lifted, seeds, std::nullopt);
    verdict.stats.product_states = reach.states.size();
    verdict.stats.product_transitions = reach.moves;
    auto hit = detail::best_empty(model, reach, empty_id);
    if (!hit) return verdict;
    return detail::finish(verdict, detail::observation_of(model, reach.path_to(*hit)), 0,
                          seeds[reach.seed_of[*hit]].left, reach.states[*hit].left, {});
  }

  std::vector<ProductState> init;
  for (StateId q0 : model.initial()) init.push_back({q0, obs.initial});
  const SeededReach reach = seeded_product_reach(model, lifted, init, std::nullopt);
  verdict.stats.product_states = reach.states.size();
  verdict.stats.product_transitions = reach.moves;

  if (query.variant == Property::kStrongCurrentStateOpacity) {
    auto hit = detail::best_empty(model, reach, empty_id, is_secret);
    if (!hit) return verdict;
    auto word = detail::observation_of(model, reach.path_to(*hit));
    const std::size_t split = word.size();
    return detail::finish(verdict, std::move(word), split, reach.states[*hit].left, reach.states[*hit].left, {});
  }

  if (query.variant == Property::kStrongInfiniteStepOpacity) {
    auto hit = detail::best_empty(model, reach, empty_id);
    if (!hit) return verdict;
    // A run reaching an empty estimate has visited a secret state; report the
    // last one.
    const auto run = reach.path_to(*hit);
    StateId start = init[reach.seed_of[*hit]].left;
    std::optional<std::pair<StateId, std::size_t>> last;
    std::size_t seen = 0;
    if (is_secret(start)) last = {start, 0};
    for (const Transition& t : run) {
      if (model.observable(t.event)) ++seen;
      if (is_secret(t.to)) last = {t.to, seen};
    }
    return detail::finish(verdict, detail::observation_of(model, run), last->second, last->first,
                          reach.states[*hit].left, {});
  }

  // SKSO: from every reachable secret (q, x), no empty estimate within K.
  std::vector<std::uint32_t> secret_entries;
  for (std::uint32_t i = 0; i < reach.states.size(); ++i) {
    if (is_secret(reach.states[i].left)) secret_entries.push_back(i);
  }
  if (secret_entries.empty() || !empty_id) return verdict;
  std::vector<ProductState> seeds;
  for (auto i : secret_entries) seeds.push_back(reach.states[i]);
  const SeededReach capped = seeded_product_reach(model, lifted, seeds, *verdict.effective_k);
  if (!detail::best_empty(model, capped, empty_id)) return verdict;

  std::optional<std::vector<LabelId>> best_obs;
  std::size_t best_split = 0;
  StateId best_secret = 0, best_left = 0;
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    const SeededReach one = seeded_product_reach(model, lifted, seeds[j], *verdict.effective_k);
    auto hit = detail::best_empty(model, one, empty_id);
    if (!hit) continue;
    std::vector<LabelId> word = detail::observation_of(model, reach.path_to(secret_entries[j]));
    const std::size_t split = word.size();
    for (LabelId a : detail::observation_of(model, one.path_to(*hit))) word.push_back(a);
    if (!best_obs || word.size() < best_obs->size() || (word.size() == best_obs->size() && word < *best_obs)) {
      best_obs = std::move(word);
      best_split = split;
      best_secret = seeds[j].left;
      best_left = one.states[*hit].left;
    }
  }
  return detail::finish(verdict, *best_obs, best_split, best_secret, best_left, {});
}

/// CC(S_eps, S_obs^eps) from Q0 x {q0obs} together with the seeds
/// (q, UR(x \ Q_S)) used by the infinite-step check.
inline ProductAutomaton observer_product(const Lfsa& model, const SecretSpec& secrets) {
  const ObserverAutomaton obs = build_observer(model);
  std::vector<StateSet> roots{obs.states[obs.initial]};
  std::vector<std::pair<StateId, StateSet>> seeds;
  for (const StateSet& x : obs.states) {
    const StateSet rest = unobservable_reach(model, x.minus(secrets.secret));
    for (StateId q : x.intersect(secrets.secret)) seeds.push_back({q, rest});
    roots.push_back(rest);
  }
  const ObserverAutomaton ext = build_observer(model, roots);
  std::vector<ProductState> start;
  for (StateId q0 : model.initial()) start.push_back({q0, ext.initial});
  for (const auto& [q, rest] : seeds) start.push_back({q, *ext.find(rest)});
  return concurrent_composition(epsilonize(model).automaton, lift_observer(ext), start);
}

/// CC(S_eps, S_dssobs^eps) from Q0 x {q0dssobs}.
inline ProductAutomaton dss_observer_product(const Lfsa& model, const SecretSpec& secrets) {
  const SubautomatonReport dss = delete_secret(model, secrets);
  const ObserverAutomaton obs = build_observer(dss.automaton);
  std::vector<ProductState> start;
  for (StateId q0 : model.initial()) start.push_back({q0, obs.initial});
  return concurrent_composition(epsilonize(model).automaton, lift_observer(obs), start);
}

inline OpacityVerdict check_opacity(const Lfsa& model, const OpacityQuery& query) {
  return is_strong_opacity(query.variant) ? check_strong_opacity(model, query)
                                          : check_standard_opacity(model, query);
}

}  // namespace desv
