#pragma once

// Definitional machinery kept apart from the verifiers: witness validation
// against the raw definitions, and a bounded exhaustive search over
// observations. State estimates here are recomputed from the transition list
// with local closure code.

#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "desv/lfsa.hpp"
#include "desv/property.hpp"

namespace desv {

class MalformedClaim : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DefinitionalClaim {
  PropertyInstance instance;
  std::variant<InferenceWitness, OpacityWitness> witness;
};

struct ClaimCheck {
  bool valid = false;
  std::string explanation;
};

/// A violation found by enumeration. For split variants the secret state is
/// visited after the first `split` symbols.
struct Counterexample {
  Property property = Property::kCurrentStateOpacity;
  std::vector<LabelId> observation;
  std::size_t split = 0;
};

namespace oracle {

using Mask = std::vector<char>;

/// Which transitions and target states a run may use.
struct Filter {
  const FaultSpec* no_faults = nullptr;  // skip these events
  const StateSet* avoid = nullptr;       // never enter these states
  bool admits(const Lfsa& m, const Transition& t) const {
    (void)m;
    if (no_faults && no_faults->contains(t.event)) return false;
    if (avoid && avoid->contains(t.to)) return false;
    return true;
  }
};

inline Mask closure(const Lfsa& m, Mask x, const Filter& f) {
  std::vector<StateId> stack;
  for (StateId q = 0; q < x.size(); ++q) {
    if (x[q]) stack.push_back(q);
  }
  while (!stack.empty()) {
    const StateId q = stack.back();
    stack.pop_back();
    for (const Transition& t : m.transitions()) {
      if (t.from != q || m.observable(t.event) || !f.admits(m, t) || x[t.to]) continue;
      x[t.to] = 1;
      stack.push_back(t.to);
    }
  }
  return x;
}

inline Mask step(const Lfsa& m, const Mask& x, LabelId a, const Filter& f) {
  Mask y(m.num_states(), 0);
  for (const Transition& t : m.transitions()) {
    if (x[t.from] && m.observable(t.event) && m.label(t.event) == a && f.admits(m, t)) y[t.to] = 1;
  }
  return closure(m, std::move(y), f);
}

inline Mask along(const Lfsa& m, Mask x, const std::vector<LabelId>& word, const Filter& f) {
  x = closure(m, std::move(x), f);
  for (LabelId a : word) x = step(m, x, a, f);
  return x;
}

inline Mask mask_of(const Lfsa& m, const StateSet& s) {
  Mask x(m.num_states(), 0);
  for (StateId q : s) x[q] = 1;
  return x;
}

inline Mask single(const Lfsa& m, StateId q) {
  Mask x(m.num_states(), 0);
  x[q] = 1;
  return x;
}

inline bool empty(const Mask& x) {
  for (char c : x) {
    if (c) return false;
  }
  return true;
}

inline std::size_t count(const Mask& x) {
  std::size_t n = 0;
  for (char c : x) n += c ? 1 : 0;
  return n;
}

inline bool has_transition(const Lfsa& m, StateId from, EventId e, StateId to) {
  for (const Transition& t : m.transitions()) {
    if (t.from == from && t.event == e && t.to == to) return true;
  }
  return false;
}

/// Longest run length from each state, capped at `cap`, using transitions
/// accepted by the filter.
inline std::vector<std::size_t> run_length(const Lfsa& m, std::size_t cap, const Filter& f) {
  std::vector<std::size_t> len(m.num_states(), 0);
  for (std::size_t round = 0; round < cap; ++round) {
    std::vector<std::size_t> next = len;
    for (const Transition& t : m.transitions()) {
      if (!f.admits(m, t)) continue;
      next[t.from] = std::max(next[t.from], std::min(cap, len[t.to] + 1));
    }
    len = std::move(next);
  }
  return len;
}

inline std::string label_text(const Lfsa& m, const std::vector<LabelId>& w) {
  std::string out;
  for (LabelId a : w) out += (out.empty() ? "" : " ") + m.output_name(a);
  return out.empty() ? "ε" : out;
}

// ---------------------------------------------------------------------------
// Witness validation.

inline void check_state(const Lfsa& m, StateId q) {
  if (q >= m.num_states()) throw MalformedClaim("state id " + std::to_string(q) + " does not exist");
}

inline void check_event(const Lfsa& m, EventId e) {
  if (e >= m.num_events()) throw MalformedClaim("event id " + std::to_string(e) + " does not exist");
}

struct PairRun {
  std::vector<LabelId> labels;
  std::size_t left_moves = 0;
};

/// Checks a chain of product steps; returns "" when every step is a move of
/// the model, or the reason it is not.
inline std::string check_steps(const Lfsa& m, const std::vector<PairStep>& steps, PairRun& run,
                               std::optional<std::pair<StateId, StateId>>& at) {
  for (const PairStep& s : steps) {
    for (StateId q : {s.left_from, s.right_from, s.left_to, s.right_to}) check_state(m, q);
    if (at && (at->first != s.left_from || at->second != s.right_from)) {
      throw MalformedClaim("product steps do not chain");
    }
    if (!s.left_event && !s.right_event) throw MalformedClaim("product step moves neither component");
    if (s.left_event) {
      check_event(m, *s.left_event);
      if (!has_transition(m, s.left_from, *s.left_event, s.left_to)) {
        return "no transition " + m.state_name(s.left_from) + " -" + m.event_name(*s.left_event) + "-> " +
               m.state_name(s.left_to);
      }
      ++run.left_moves;
    } else if (s.left_from != s.left_to) {
      throw MalformedClaim("idle left component changes state");
    }
    if (s.right_event) {
      check_event(m, *s.right_event);
      if (!has_transition(m, s.right_from, *s.right_event, s.right_to)) {
        return "no transition " + m.state_name(s.right_from) + " -" + m.event_name(*s.right_event) + "-> " +
               m.state_name(s.right_to);
      }
    } else if (s.right_from != s.right_to) {
      throw MalformedClaim("idle right component changes state");
    }
    if (s.left_event && s.right_event) {
      if (!m.observable(*s.left_event) || m.label(*s.left_event) != m.label(*s.right_event)) {
        return "synchronized events " + m.event_name(*s.left_event) + " and " + m.event_name(*s.right_event) +
               " do not carry the same observable label";
      }
      run.labels.push_back(m.label(*s.left_event));
    } else {
      const EventId e = s.left_event ? *s.left_event : *s.right_event;
      if (m.observable(e)) return "observable event " + m.event_name(e) + " moves one component alone";
    }
    at = std::pair{s.left_to, s.right_to};
  }
  return "";
}

inline std::string check_model_run(const Lfsa& m, StateId start, const std::vector<Transition>& run,
                                   const FaultSpec* forbid) {
  StateId at = start;
  for (const Transition& t : run) {
    check_state(m, t.from);
    check_state(m, t.to);
    check_event(m, t.event);
    if (t.from != at) throw MalformedClaim("model run does not chain");
    if (!has_transition(m, t.from, t.event, t.to)) {
      return "no transition " + m.state_name(t.from) + " -" + m.event_name(t.event) + "-> " + m.state_name(t.to);
    }
    if (forbid && forbid->contains(t.event)) return "run uses faulty event " + m.event_name(t.event);
    at = t.to;
  }
  return "";
}

inline StateId run_end(StateId start, const std::vector<Transition>& run) {
  return run.empty() ? start : run.back().to;
}

inline std::pair<StateId, StateId> steps_end(std::pair<StateId, StateId> start, const std::vector<PairStep>& s) {
  return s.empty() ? start : std::pair{s.back().left_to, s.back().right_to};
}

inline std::pair<StateId, StateId> steps_start(const std::vector<PairStep>& s, std::pair<StateId, StateId> dflt) {
  return s.empty() ? dflt : std::pair{s.front().left_from, s.front().right_from};
}

inline ClaimCheck invalid(std::string why) { return {false, std::move(why)}; }

inline ClaimCheck validate_inference(const Lfsa& m, const PropertyInstance& inst, const InferenceWitness& w) {
  const Property p = inst.property;
  PairRun head, pump, tail;
  std::optional<std::pair<StateId, StateId>> at;
  auto require_initial = [&](std::pair<StateId, StateId> s) {
    if (!m.initial().contains(s.first) || !m.initial().contains(s.second)) {
      throw MalformedClaim("product run does not start from initial states");
    }
  };

  if (p == Property::kStarStrongDetectability || p == Property::kOmegaStrongDetectability) {
    if (w.cycle.empty()) throw MalformedClaim("pump segment is empty");
    const auto start = steps_start(w.prefix, steps_start(w.cycle, {0, 0}));
    check_state(m, start.first);
    check_state(m, start.second);
    require_initial(start);
    if (auto e = check_steps(m, w.prefix, head, at); !e.empty()) return invalid(e);
    const auto pump_at = steps_start(w.cycle, {0, 0});
    if (auto e = check_steps(m, w.cycle, pump, at); !e.empty()) return invalid(e);
    if (*at != pump_at) throw MalformedClaim("pump segment is not a cycle");
    if (pump.labels.empty()) return invalid("pump segment carries no observation");
    if (auto e = check_steps(m, w.suffix, tail, at); !e.empty()) return invalid(e);
    const auto end = *at;
    if (end.first == end.second) return invalid("the two runs end in the same state");
    if (w.pump_count == 0) throw MalformedClaim("pump count must be positive");
    std::vector<LabelId> sigma = head.labels;
    for (std::uint64_t i = 0; i < w.pump_count; ++i) sigma.insert(sigma.end(), pump.labels.begin(), pump.labels.end());
    sigma.insert(sigma.end(), tail.labels.begin(), tail.labels.end());
    const Mask est = along(m, mask_of(m, m.initial()), sigma, {});
    if (!est[end.first] || !est[end.second] || count(est) < 2) {
      return invalid("estimate after the pumped observation is a singleton");
    }
    if (p == Property::kOmegaStrongDetectability) {
      if (w.model_cycle.empty()) throw MalformedClaim("infinite continuation has no cycle");
      if (auto e = check_model_run(m, end.first, w.model_path, nullptr); !e.empty()) return invalid(e);
      const StateId loop = run_end(end.first, w.model_path);
      if (auto e = check_model_run(m, loop, w.model_cycle, nullptr); !e.empty()) return invalid(e);
      if (w.model_cycle.back().to != loop) throw MalformedClaim("infinite continuation cycle is not closed");
    }
    return {true, "M(" + std::to_string(sigma.size()) + " symbols) has " + std::to_string(count(est)) +
                      " states after pumping " + std::to_string(w.pump_count) + " times"};
  }

  if (p == Property::kDiagnosability) {
    if (!w.fault_step) throw MalformedClaim("no fault step");
    if (w.cycle.empty()) throw MalformedClaim("pump segment is empty");
    const auto start = steps_start(w.prefix, {w.fault_step->left_from, w.fault_step->right_from});
    check_state(m, start.first);
    check_state(m, start.second);
    require_initial(start);
    PairRun fault_run, connector;
    if (auto e = check_steps(m, w.prefix, head, at); !e.empty()) return invalid(e);
    if (!w.fault_step->left_event || !inst.faults.contains(*w.fault_step->left_event)) {
      return invalid("fault step does not move the left run by a faulty event");
    }
    if (auto e = check_steps(m, {*w.fault_step}, fault_run, at); !e.empty()) return invalid(e);
    if (auto e = check_steps(m, w.connector, connector, at); !e.empty()) return invalid(e);
    const auto pump_at = steps_start(w.cycle, *at);
    if (auto e = check_steps(m, w.cycle, pump, at); !e.empty()) return invalid(e);
    if (*at != pump_at) throw MalformedClaim("pump segment is not a cycle");
    if (pump.left_moves == 0) return invalid("pump segment does not move the faulty run");
    for (const auto* seg : {&w.prefix, &w.connector, &w.cycle}) {
      for (const PairStep& s : *seg) {
        if (s.right_event && inst.faults.contains(*s.right_event)) return invalid("right run contains a fault");
      }
    }
    if (w.fault_step->right_event && inst.faults.contains(*w.fault_step->right_event)) {
      return invalid("right run contains a fault");
    }
    if (w.pump_count == 0) throw MalformedClaim("pump count must be positive");
    std::vector<LabelId> sigma = head.labels;
    sigma.insert(sigma.end(), fault_run.labels.begin(), fault_run.labels.end());
    sigma.insert(sigma.end(), connector.labels.begin(), connector.labels.end());
    for (std::uint64_t i = 0; i < w.pump_count; ++i) sigma.insert(sigma.end(), pump.labels.begin(), pump.labels.end());
    const std::uint64_t after = connector.left_moves + w.pump_count * pump.left_moves;
    if (after < w.pump_count) return invalid("continuation after the fault is too short");
    Filter ff;
    ff.no_faults = &inst.faults;
    const Mask normal = along(m, mask_of(m, m.initial()), sigma, ff);
    if (empty(normal)) return invalid("no fault-free run matches the observation " + label_text(m, sigma));
    return {true, std::to_string(after) + " events after the fault, still matched by a fault-free run"};
  }

  if (p == Property::kPredictability) {
    const auto start = steps_start(w.prefix, {0, 0});
    if (w.prefix.empty()) {
      // An empty prefix starts at the fault source / continuation start.
      if (!w.model_fault) throw MalformedClaim("no fault transition");
    }
    const std::pair<StateId, StateId> s0 =
        w.prefix.empty() ? std::pair{w.model_fault->from, w.model_path.empty()
                                                              ? (w.model_cycle.empty() ? w.model_fault->from
                                                                                       : w.model_cycle.front().from)
                                                              : w.model_path.front().from}
                         : start;
    check_state(m, s0.first);
    check_state(m, s0.second);
    require_initial(s0);
    at = s0;
    if (auto e = check_steps(m, w.prefix, head, at); !e.empty()) return invalid(e);
    for (const PairStep& s : w.prefix) {
      if ((s.left_event && inst.faults.contains(*s.left_event)) ||
          (s.right_event && inst.faults.contains(*s.right_event))) {
        return invalid("prefix contains a fault");
      }
    }
    const auto end = *at;
    if (!w.model_fault) throw MalformedClaim("no fault transition");
    if (auto e = check_model_run(m, end.first, {*w.model_fault}, nullptr); !e.empty()) return invalid(e);
    if (!inst.faults.contains(w.model_fault->event)) return invalid("announced transition is not faulty");
    if (w.model_cycle.empty()) throw MalformedClaim("fault-free continuation has no cycle");
    if (auto e = check_model_run(m, end.second, w.model_path, &inst.faults); !e.empty()) return invalid(e);
    const StateId loop = run_end(end.second, w.model_path);
    if (auto e = check_model_run(m, loop, w.model_cycle, &inst.faults); !e.empty()) return invalid(e);
    if (w.model_cycle.back().to != loop) throw MalformedClaim("fault-free continuation cycle is not closed");
    Filter ff;
    ff.no_faults = &inst.faults;
    const Mask normal = along(m, mask_of(m, m.initial()), head.labels, ff);
    if (!normal[end.first] || !normal[end.second]) return invalid("prefix states are not fault-free estimates");
    return {true, "after " + label_text(m, head.labels) + " a fault is possible while a fault-free run never ends"};
  }
  throw MalformedClaim("inference witness for an opacity property");
}

inline ClaimCheck validate_opacity(const Lfsa& m, const PropertyInstance& inst, const OpacityWitness& w) {
  const Property p = inst.property;
  const StateSet& secret = inst.secrets.secret;
  check_state(m, w.secret_state);
  for (LabelId a : w.observation) {
    if (a >= m.num_outputs()) throw MalformedClaim("observation symbol out of range");
  }
  if (w.split > w.observation.size()) throw MalformedClaim("split beyond the observation");
  if (!secret.contains(w.secret_state)) return invalid(m.state_name(w.secret_state) + " is not secret");
  const std::vector<LabelId> alpha(w.observation.begin(), w.observation.begin() + w.split);
  const std::vector<LabelId> beta(w.observation.begin() + w.split, w.observation.end());
  const std::vector<LabelId>& sigma = w.observation;

  Mask init_secret(m.num_states(), 0), init_open(m.num_states(), 0);
  for (StateId q : m.initial()) (secret.contains(q) ? init_secret : init_open)[q] = 1;
  Filter clean;
  clean.avoid = &secret;

  const bool initial_variant = p == Property::kInitialStateOpacity || p == Property::kStrongInitialStateOpacity;
  if (initial_variant) {
    if (w.split != 0) throw MalformedClaim("initial-state witness must split at 0");
    if (!m.initial().contains(w.secret_state)) return invalid(m.state_name(w.secret_state) + " is not initial");
  } else {
    const Mask m_alpha = along(m, mask_of(m, m.initial()), alpha, {});
    if (!m_alpha[w.secret_state]) {
      return invalid(m.state_name(w.secret_state) + " is not reachable under " + label_text(m, alpha));
    }
  }
  if (empty(along(m, single(m, w.secret_state), beta, {}))) {
    return invalid("no run from " + m.state_name(w.secret_state) + " produces " + label_text(m, beta));
  }
  if ((p == Property::kKStepOpacity || p == Property::kStrongKStepOpacity)) {
    if (!inst.k) throw MalformedClaim("K missing");
    if (beta.size() > *inst.k) return invalid("secret lies more than K observations in the past");
  }
  if ((p == Property::kCurrentStateOpacity || p == Property::kStrongCurrentStateOpacity) &&
      w.split != w.observation.size()) {
    throw MalformedClaim("current-state witness must split at the end");
  }

  Mask matching;
  switch (p) {
    case Property::kCurrentStateOpacity: {
      Mask est = along(m, mask_of(m, m.initial()), sigma, {});
      for (StateId q : secret) est[q] = 0;
      matching = est;
      break;
    }
    case Property::kInitialStateOpacity:
      matching = along(m, init_open, sigma, {});
      break;
    case Property::kInfiniteStepOpacity:
    case Property::kKStepOpacity: {
      Mask mid = along(m, mask_of(m, m.initial()), alpha, {});
      for (StateId q : secret) mid[q] = 0;
      matching = along(m, mid, beta, {});
      break;
    }
    case Property::kStrongCurrentStateOpacity:
    case Property::kStrongInitialStateOpacity:
    case Property::kStrongInfiniteStepOpacity:
    case Property::kStrongKStepOpacity:
      matching = along(m, init_open, sigma, clean);
      break;
    default:
      throw MalformedClaim("opacity witness for an inference property");
  }
  if (!empty(matching)) return invalid("a matching run exists for " + label_text(m, sigma));
  return {true, "no admissible run matches " + label_text(m, sigma)};
}

// ---------------------------------------------------------------------------
// Bounded search.

struct Config {
  std::uint8_t phase = 1;
  Mask a, b;
  std::vector<std::int16_t> counts;
  std::uint64_t aux = 0;
  std::size_t split = 0;

  std::string key() const {
    std::string k(1, static_cast<char>(phase));
    k.append(a.begin(), a.end());
    k.push_back('|');
    k.append(b.begin(), b.end());
    k.push_back('|');
    for (auto c : counts) k.append(reinterpret_cast<const char*>(&c), sizeof c);
    k.append(reinterpret_cast<const char*>(&aux), sizeof aux);
    return k;
  }
};

inline std::uint64_t budget() {
  if (const char* env = std::getenv("DESV_BUDGET")) {
    try {
      return std::stoull(env);
    } catch (...) {
    }
  }
  return 2'000'000;
}

}  // namespace oracle

/// Checks a witness against the definitions. Malformed claims (dangling ids,
/// pumps that are not cycles) throw MalformedClaim; a well-formed claim that
/// does not certify a violation yields valid == false with the reason.
inline ClaimCheck validate_witness(const Lfsa& model, const DefinitionalClaim& claim) {
  if (const auto* w = std::get_if<InferenceWitness>(&claim.witness)) {
    if (!is_inference(claim.instance.property)) throw MalformedClaim("inference witness for an opacity property");
    return oracle::validate_inference(model, claim.instance, *w);
  }
  if (is_inference(claim.instance.property)) throw MalformedClaim("opacity witness for an inference property");
  return oracle::validate_opacity(model, claim.instance, std::get<OpacityWitness>(claim.witness));
}

/// Enumerates every observation of length at most `bound` (configurations
/// are merged when equal) and evaluates the definition on it. A result of
/// nullopt is evidence, not proof.
inline std::optional<Counterexample> bounded_definitional_search(const Lfsa& m, const PropertyInstance& inst,
                                                                 std::size_t bound) {
  using namespace oracle;
  if (bound < 1) throw QueryError("bound must be at least 1");
  const Property p = inst.property;
  const std::size_t n = m.num_states();
  const StateSet& secret = inst.secrets.secret;
  const std::uint64_t k = inst.k.value_or(0);
  const bool k_variant = needs_k(p);
  if (k_variant && k < 1) throw QueryError("K must be positive");
  const std::uint64_t sq = static_cast<std::uint64_t>(n) * n;
  const std::vector<LabelId> labels = m.observable_labels();

  Filter all, ff, clean;
  ff.no_faults = &inst.faults;
  clean.avoid = &secret;
  Mask q0 = mask_of(m, m.initial()), q0_secret(n, 0), q0_open(n, 0);
  for (StateId q : m.initial()) (secret.contains(q) ? q0_secret : q0_open)[q] = 1;
  auto minus_secret = [&](Mask x) {
    for (StateId q : secret) x[q] = 0;
    return x;
  };
  auto meets_secret = [&](const Mask& x) {
    for (StateId q : secret) {
      if (x[q]) return true;
    }
    return false;
  };
  auto within_secret = [&](const Mask& x) {
    for (StateId q = 0; q < n; ++q) {
      if (x[q] && !secret.contains(q)) return false;
    }
    return true;
  };
  const std::vector<std::size_t> run_all = run_length(m, n + 1, all);
  const std::vector<std::size_t> run_ff = run_length(m, n + 1, ff);
  std::vector<bool> fault_source(n, false);
  for (const Transition& t : m.transitions()) {
    if (inst.faults.contains(t.event)) fault_source[t.from] = true;
  }
  const std::int16_t cap = static_cast<std::int16_t>(std::min<std::uint64_t>(sq + 1, 30000));

  // Diagnosability bookkeeping: longest post-fault event count per state.
  auto settle_counts = [&](const Mask& normal, std::vector<std::int16_t> c) {
    for (const Transition& t : m.transitions()) {
      if (!m.observable(t.event) && inst.faults.contains(t.event) && normal[t.from]) c[t.to] = std::max<std::int16_t>(c[t.to], 0);
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (const Transition& t : m.transitions()) {
        if (m.observable(t.event) || c[t.from] < 0) continue;
        const auto v = static_cast<std::int16_t>(std::min<int>(cap, c[t.from] + 1));
        if (v > c[t.to]) {
          c[t.to] = v;
          changed = true;
        }
      }
      for (const Transition& t : m.transitions()) {
        if (!m.observable(t.event) && inst.faults.contains(t.event) && normal[t.from] && c[t.to] < 0) {
          c[t.to] = 0;
          changed = true;
        }
      }
    }
    return c;
  };

  Config init;
  switch (p) {
    case Property::kStarStrongDetectability:
    case Property::kOmegaStrongDetectability:
    case Property::kCurrentStateOpacity:
    case Property::kInfiniteStepOpacity:
    case Property::kKStepOpacity:
      init.a = closure(m, q0, all);
      break;
    case Property::kInitialStateOpacity:
      init.a = closure(m, q0_secret, all);
      init.b = closure(m, q0_open, all);
      break;
    case Property::kStrongCurrentStateOpacity:
    case Property::kStrongInfiniteStepOpacity:
    case Property::kStrongKStepOpacity:
      init.a = closure(m, q0, all);
      init.b = closure(m, q0_open, clean);
      break;
    case Property::kStrongInitialStateOpacity:
      init.a = closure(m, q0_secret, all);
      init.b = closure(m, q0_open, clean);
      break;
    case Property::kDiagnosability:
      init.a = closure(m, q0, ff);
      init.counts = settle_counts(init.a, std::vector<std::int16_t>(n, -1));
      break;
    case Property::kPredictability:
      init.a = closure(m, q0, ff);
      break;
  }

  const bool split_variant = p == Property::kInfiniteStepOpacity || p == Property::kKStepOpacity ||
                             p == Property::kStrongInfiniteStepOpacity || p == Property::kStrongKStepOpacity;
  const bool strong_split = p == Property::kStrongInfiniteStepOpacity || p == Property::kStrongKStepOpacity;

  auto bad = [&](const Config& c) {
    switch (p) {
      case Property::kStarStrongDetectability:
        return c.aux > sq && count(c.a) > 1;
      case Property::kOmegaStrongDetectability: {
        if (c.aux <= sq || count(c.a) < 2) return false;
        for (StateId q = 0; q < n; ++q) {
          if (c.a[q] && run_all[q] > n) return true;
        }
        return false;
      }
      case Property::kCurrentStateOpacity:
        return !empty(c.a) && within_secret(c.a);
      case Property::kInitialStateOpacity:
      case Property::kStrongInitialStateOpacity:
        return !empty(c.a) && empty(c.b);
      case Property::kStrongCurrentStateOpacity:
        return meets_secret(c.a) && empty(c.b);
      case Property::kInfiniteStepOpacity:
      case Property::kKStepOpacity:
      case Property::kStrongInfiniteStepOpacity:
      case Property::kStrongKStepOpacity:
        return c.phase == 2 && !empty(c.a) && empty(c.b) && (!k_variant || c.aux <= k);
      case Property::kDiagnosability: {
        if (empty(c.a)) return false;
        for (auto v : c.counts) {
          if (v >= cap) return true;
        }
        return false;
      }
      case Property::kPredictability: {
        bool fault = false, forever = false;
        for (StateId q = 0; q < n; ++q) {
          if (!c.a[q]) continue;
          fault = fault || fault_source[q];
          forever = forever || run_ff[q] > n;
        }
        return fault && forever;
      }
    }
    return false;
  };

  auto next = [&](const Config& c, LabelId a) -> std::optional<Config> {
    Config d = c;
    switch (p) {
      case Property::kStarStrongDetectability:
      case Property::kOmegaStrongDetectability:
        d.a = step(m, c.a, a, all);
        d.aux = std::min<std::uint64_t>(c.aux + 1, sq + 1);
        if (empty(d.a)) return std::nullopt;
        return d;
      case Property::kCurrentStateOpacity:
        d.a = step(m, c.a, a, all);
        if (empty(d.a)) return std::nullopt;
        return d;
      case Property::kInitialStateOpacity:
        d.a = step(m, c.a, a, all);
        d.b = step(m, c.b, a, all);
        if (empty(d.a)) return std::nullopt;
        return d;
      case Property::kStrongCurrentStateOpacity:
        d.a = step(m, c.a, a, all);
        d.b = step(m, c.b, a, clean);
        if (empty(d.a)) return std::nullopt;
        return d;
      case Property::kStrongInitialStateOpacity:
        d.a = step(m, c.a, a, all);
        d.b = step(m, c.b, a, clean);
        if (empty(d.a)) return std::nullopt;
        return d;
      case Property::kInfiniteStepOpacity:
      case Property::kKStepOpacity:
      case Property::kStrongInfiniteStepOpacity:
      case Property::kStrongKStepOpacity:
        d.a = step(m, c.a, a, all);
        if (strong_split || c.phase == 2) d.b = step(m, c.b, a, strong_split ? clean : all);
        if (c.phase == 2) {
          if (k_variant && c.aux >= k) return std::nullopt;
          d.aux = c.aux + 1;
        }
        if (empty(d.a)) return std::nullopt;
        return d;
      case Property::kDiagnosability: {
        d.a = step(m, c.a, a, ff);
        std::vector<std::int16_t> moved(n, -1);
        for (const Transition& t : m.transitions()) {
          if (!m.observable(t.event) || m.label(t.event) != a) continue;
          if (c.counts[t.from] >= 0) {
            moved[t.to] = std::max<std::int16_t>(moved[t.to], static_cast<std::int16_t>(std::min<int>(cap, c.counts[t.from] + 1)));
          }
          if (inst.faults.contains(t.event) && c.a[t.from]) moved[t.to] = std::max<std::int16_t>(moved[t.to], 0);
        }
        d.counts = settle_counts(d.a, std::move(moved));
        if (empty(d.a)) return std::nullopt;
        return d;
      }
      case Property::kPredictability:
        d.a = step(m, c.a, a, ff);
        if (empty(d.a)) return std::nullopt;
        return d;
    }
    return std::nullopt;
  };

  auto spawns = [&](const Config& c, std::size_t depth) {
    std::vector<Config> out;
    if (!split_variant || c.phase != 1) return out;
    for (StateId q : secret) {
      if (!c.a[q]) continue;
      Config d;
      d.phase = 2;
      d.a = closure(m, single(m, q), all);
      d.b = strong_split ? c.b : closure(m, minus_secret(c.a), all);
      d.aux = 0;
      d.split = depth;
      out.push_back(std::move(d));
    }
    return out;
  };

  struct Node {
    Config c;
    std::optional<std::uint32_t> parent;
    std::optional<LabelId> label;
  };
  std::vector<Node> nodes;
  std::unordered_set<std::string> seen;
  const std::uint64_t limit = budget();
  auto add = [&](Config c, std::optional<std::uint32_t> parent, std::optional<LabelId> label,
                 std::vector<std::uint32_t>& level) {
    if (!seen.insert(c.key()).second) return;
    if (nodes.size() >= limit) throw BudgetExceeded("bounded search exceeded DESV_BUDGET");
    nodes.push_back({std::move(c), parent, label});
    level.push_back(static_cast<std::uint32_t>(nodes.size() - 1));
  };
  auto word_of = [&](std::uint32_t i) {
    std::vector<LabelId> w;
    for (std::optional<std::uint32_t> cur = i; cur; cur = nodes[*cur].parent) {
      if (nodes[*cur].label) w.push_back(*nodes[*cur].label);
    }
    std::reverse(w.begin(), w.end());
    return w;
  };

  std::vector<std::uint32_t> level;
  add(init, std::nullopt, std::nullopt, level);
  for (std::size_t depth = 0;; ++depth) {
    // Zero-cost spawns join the current level before it is inspected.
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (Config& d : spawns(nodes[level[i]].c, depth)) add(std::move(d), level[i], std::nullopt, level);
    }
    for (std::uint32_t i : level) {
      if (!bad(nodes[i].c)) continue;
      Counterexample cex;
      cex.property = p;
      cex.observation = word_of(i);
      cex.split = nodes[i].c.phase == 2 ? nodes[i].c.split
                  : (p == Property::kInitialStateOpacity || p == Property::kStrongInitialStateOpacity)
                      ? 0
                      : cex.observation.size();
      return cex;
    }
    if (depth == bound) return std::nullopt;
    std::vector<std::uint32_t> upcoming;
    for (std::uint32_t i : level) {
      for (LabelId a : labels) {
        if (auto d = next(nodes[i].c, a)) add(std::move(*d), i, a, upcoming);
      }
    }
    if (upcoming.empty()) return std::nullopt;
    level = std::move(upcoming);
  }
}

}  // namespace desv
