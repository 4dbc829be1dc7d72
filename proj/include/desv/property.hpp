#pragma once

// Property identifiers, verdicts and witnesses shared by the verifiers, the
// oracle and the file formats.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "desv/lfsa.hpp"

namespace desv {

enum class Property {
  kStarStrongDetectability,
  kOmegaStrongDetectability,
  kDiagnosability,
  kPredictability,
  kCurrentStateOpacity,
  kInitialStateOpacity,
  kInfiniteStepOpacity,
  kKStepOpacity,
  kStrongCurrentStateOpacity,
  kStrongInitialStateOpacity,
  kStrongInfiniteStepOpacity,
  kStrongKStepOpacity,
};

inline constexpr Property kAllProperties[] = {
    Property::kStarStrongDetectability,   Property::kOmegaStrongDetectability,
    Property::kDiagnosability,            Property::kPredictability,
    Property::kCurrentStateOpacity,       Property::kInitialStateOpacity,
    Property::kInfiniteStepOpacity,       Property::kKStepOpacity,
    Property::kStrongCurrentStateOpacity, Property::kStrongInitialStateOpacity,
    Property::kStrongInfiniteStepOpacity, Property::kStrongKStepOpacity,
};

/// Command-line spelling.
inline std::string_view property_name(Property p) {
  switch (p) {
    case Property::kStarStrongDetectability: return "star-sd";
    case Property::kOmegaStrongDetectability: return "omega-sd";
    case Property::kDiagnosability: return "diag";
    case Property::kPredictability: return "pred";
    case Property::kCurrentStateOpacity: return "cso";
    case Property::kInitialStateOpacity: return "iso";
    case Property::kInfiniteStepOpacity: return "infso";
    case Property::kKStepOpacity: return "kso";
    case Property::kStrongCurrentStateOpacity: return "scso";
    case Property::kStrongInitialStateOpacity: return "siso";
    case Property::kStrongInfiniteStepOpacity: return "sinfso";
    case Property::kStrongKStepOpacity: return "skso";
  }
  return "?";
}

inline std::optional<Property> parse_property(std::string_view name) {
  for (Property p : kAllProperties) {
    if (property_name(p) == name) return p;
  }
  return std::nullopt;
}

inline bool is_inference(Property p) {
  return p == Property::kStarStrongDetectability || p == Property::kOmegaStrongDetectability ||
         p == Property::kDiagnosability || p == Property::kPredictability;
}

inline bool is_strong_opacity(Property p) {
  return p == Property::kStrongCurrentStateOpacity || p == Property::kStrongInitialStateOpacity ||
         p == Property::kStrongInfiniteStepOpacity || p == Property::kStrongKStepOpacity;
}

inline bool needs_k(Property p) { return p == Property::kKStepOpacity || p == Property::kStrongKStepOpacity; }

/// One of the twelve checks with its parameters.
struct PropertyInstance {
  Property property = Property::kStarStrongDetectability;
  FaultSpec faults;
  SecretSpec secrets;
  std::optional<std::uint64_t> k;
};

/// A step of a product run, expressed in the ids of the source model. An
/// absent event is the epsilon component.
struct PairStep {
  StateId left_from = 0;
  StateId right_from = 0;
  std::optional<EventId> left_event;
  std::optional<EventId> right_event;
  StateId left_to = 0;
  StateId right_to = 0;
};

/// Certificate for a failed inference property.
///
/// Strong detectability: prefix reaches q1', `cycle` is the pump at q1'
/// (nonempty label), `suffix` leads to q2' with distinct components; for the
/// omega variant `model_path` + `model_cycle` give an infinite continuation
/// from q2'(L).
/// Diagnosability: prefix, then the faulty `fault_step`, then `connector`,
/// then `cycle` with a nonempty left component.
/// Predictability: prefix to q1', `model_fault` leaves q1'(L), and
/// `model_path` + `model_cycle` is a fault-free infinite run from q1'(R).
struct InferenceWitness {
  std::vector<PairStep> prefix;
  std::optional<PairStep> fault_step;
  std::vector<PairStep> connector;
  std::vector<PairStep> cycle;
  std::vector<PairStep> suffix;
  std::optional<Transition> model_fault;
  std::vector<Transition> model_path;
  std::vector<Transition> model_cycle;
  std::uint64_t pump_count = 0;
};

struct Statistics {
  std::size_t observer_states = 0;
  std::size_t product_states = 0;
  std::size_t product_transitions = 0;
};

struct InferenceVerdict {
  Property property = Property::kStarStrongDetectability;
  bool holds = true;
  std::optional<InferenceWitness> witness;
  Statistics stats;
};

/// Certificate for a failed opacity property. The secret state is visited
/// after the first `split` symbols of `observation`; for current-state
/// variants split == observation.size(), for initial-state variants split == 0
/// and `secret_state` is the secret initial state.
struct OpacityWitness {
  std::vector<LabelId> observation;
  std::size_t split = 0;
  StateId secret_state = 0;
  std::optional<StateId> violating_left;
  StateSet violating_estimate;
};

struct OpacityVerdict {
  Property property = Property::kCurrentStateOpacity;
  bool holds = true;
  std::optional<OpacityWitness> witness;
  std::optional<std::uint64_t> effective_k;
  Statistics stats;
};

class QueryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace desv
