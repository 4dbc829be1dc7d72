#pragma once

// Single entry point over all twelve properties.

#include <variant>

#include "desv/concealment.hpp"
#include "desv/inference.hpp"
#include "desv/property.hpp"

namespace desv {

using Verdict = std::variant<InferenceVerdict, OpacityVerdict>;

inline bool holds(const Verdict& v) {
  return std::visit([](const auto& x) { return x.holds; }, v);
}

inline Verdict check_property(const Lfsa& model, const PropertyInstance& inst) {
  switch (inst.property) {
    case Property::kStarStrongDetectability:
      return check_strong_detectability(model, DetectabilityVariant::kStar);
    case Property::kOmegaStrongDetectability:
      return check_strong_detectability(model, DetectabilityVariant::kOmega);
    case Property::kDiagnosability:
      return check_diagnosability(model, inst.faults);
    case Property::kPredictability:
      return check_predictability(model, inst.faults);
    default:
      return check_opacity(model, OpacityQuery{inst.property, inst.secrets, inst.k});
  }
}

}  // namespace desv
