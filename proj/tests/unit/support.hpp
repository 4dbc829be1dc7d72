#pragma once

#include <set>
#include <string>
#include <tuple>

#include "desv/desv.hpp"

namespace desv::test {

inline ParsedModel load(const std::string& name) { return load_model(std::string(DESV_MODELS_DIR) + "/" + name + ".json"); }

inline SecretSpec secrets(const Lfsa& m, std::initializer_list<const char*> names) {
  std::vector<StateId> ids;
  for (const char* n : names) ids.push_back(*m.find_state(n));
  return SecretSpec{StateSet(std::move(ids))};
}

inline FaultSpec faults(const Lfsa& m, std::initializer_list<const char*> names) {
  FaultSpec f;
  for (const char* n : names) f.faulty.push_back(*m.find_event(n));
  std::sort(f.faulty.begin(), f.faulty.end());
  return f;
}

using NamedEdge = std::tuple<std::string, std::string, std::string>;

/// Edges as (from, event, to) names, ignoring labels.
inline std::set<NamedEdge> edges(const Lfsa& m) {
  std::set<NamedEdge> out;
  for (const Transition& t : m.transitions()) {
    out.emplace(m.state_name(t.from), m.event_name(t.event), m.state_name(t.to));
  }
  return out;
}

inline std::set<std::string> state_names(const Lfsa& m) {
  return {m.state_names().begin(), m.state_names().end()};
}

inline std::set<NamedEdge> edges(const ObserverAutomaton& obs) {
  std::set<NamedEdge> out;
  auto name = [&](std::uint32_t x) { return obs.states[x].empty() ? std::string("∅") : obs.state_labels[x]; };
  for (std::uint32_t x = 0; x < obs.states.size(); ++x) {
    for (std::size_t p = 0; p < obs.alphabet.size(); ++p) {
      out.emplace(name(x), obs.outputs[obs.alphabet[p]], name(obs.delta[x][p]));
    }
  }
  return out;
}

inline Verdict verify(const Lfsa& m, Property p, const FaultSpec& f = {}, const SecretSpec& s = {},
                      std::optional<std::uint64_t> k = std::nullopt) {
  return check_property(m, PropertyInstance{p, f, s, k});
}

inline ClaimCheck validate(const Lfsa& m, const PropertyInstance& inst, const Verdict& v) {
  DefinitionalClaim claim{inst, {}};
  if (const auto* iv = std::get_if<InferenceVerdict>(&v)) {
    claim.witness = *iv->witness;
  } else {
    claim.witness = *std::get<OpacityVerdict>(v).witness;
  }
  return validate_witness(m, claim);
}

}  // namespace desv::test
