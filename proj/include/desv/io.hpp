#pragma once

// JSON model documents and verdict documents.
//
// Model document (format_version "1"):
//   {"format_version": "1",
//    "outputs": ["a", "b"],                       optional; default: labels in event order
//    "states": [{"id": "q0", "initial": true, "secret": false}, ...],
//    "events": [{"id": "e1", "label": "a", "faulty": false}, ...],   label null is epsilon
//    "transitions": [{"from": "q0", "event": "e1", "to": "q1"}, ...]}

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "desv/concealment.hpp"
#include "desv/lfsa.hpp"
#include "desv/oracle.hpp"
#include "desv/property.hpp"

namespace desv {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kFormatVersion = "1";

/// Input problem located either by line/column (syntax) or by JSON pointer
/// (structure and meaning).
class InputError : public ModelError {
 public:
  InputError(std::string message, std::string where)
      : ModelError((where.empty() ? "/" : where) + ": " + message), where_(where.empty() ? "/" : std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct ParsedModel {
  Lfsa model;
  FaultSpec faults;
  SecretSpec secrets;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      ++column;
    }
  }
  return {line, column};
}

inline void only_fields(const Json& obj, std::initializer_list<std::string_view> allowed, const std::string& ptr,
                        bool strict) {
  if (!strict) return;
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw InputError("unknown field '" + key + "'", ptr + "/" + key);
  }
}

inline const Json& field(const Json& obj, const char* name, const std::string& ptr) {
  auto it = obj.find(name);
  if (it == obj.end()) throw InputError(std::string("missing field '") + name + "'", ptr);
  return *it;
}

inline std::string string_field(const Json& obj, const char* name, const std::string& ptr) {
  const Json& v = field(obj, name, ptr);
  if (!v.is_string()) throw InputError("expected a string", ptr + "/" + name);
  return v.get<std::string>();
}

inline bool bool_field(const Json& obj, const char* name, const std::string& ptr) {
  auto it = obj.find(name);
  if (it == obj.end()) return false;
  if (!it->is_boolean()) throw InputError("expected a boolean", ptr + "/" + name);
  return it->get<bool>();
}

inline const Json& array_field(const Json& obj, const char* name, const std::string& ptr) {
  const Json& v = field(obj, name, ptr);
  if (!v.is_array()) throw InputError("expected an array", ptr + "/" + name);
  return v;
}

}  // namespace detail

inline ParsedModel parse_model(std::string_view text, bool strict = true) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    auto [line, column] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw InputError(what, "line " + std::to_string(line) + ", column " + std::to_string(column));
  }
  if (!doc.is_object()) throw InputError("document must be an object", "/");
  detail::only_fields(doc, {"format_version", "outputs", "states", "events", "transitions"}, "", strict);
  const std::string version = detail::string_field(doc, "format_version", "");
  if (version != kFormatVersion) throw InputError("unsupported format_version '" + version + "'", "/format_version");

  RawLfsa raw;
  std::vector<std::string> secret_names, fault_names;
  std::unordered_set<std::string> state_ids, event_ids;

  const Json& states = detail::array_field(doc, "states", "");
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string ptr = "/states/" + std::to_string(i);
    if (!states[i].is_object()) throw InputError("expected an object", ptr);
    detail::only_fields(states[i], {"id", "initial", "secret"}, ptr, strict);
    std::string id = detail::string_field(states[i], "id", ptr);
    if (id.empty()) throw InputError("empty state id", ptr + "/id");
    if (!state_ids.insert(id).second) throw InputError("duplicate state id '" + id + "'", ptr + "/id");
    if (detail::bool_field(states[i], "initial", ptr)) raw.initial.push_back(id);
    if (detail::bool_field(states[i], "secret", ptr)) secret_names.push_back(id);
    raw.states.push_back(std::move(id));
  }

  std::vector<std::string> used_labels;
  const Json& events = detail::array_field(doc, "events", "");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string ptr = "/events/" + std::to_string(i);
    if (!events[i].is_object()) throw InputError("expected an object", ptr);
    detail::only_fields(events[i], {"id", "label", "faulty"}, ptr, strict);
    RawLfsa::Event ev;
    ev.id = detail::string_field(events[i], "id", ptr);
    if (ev.id.empty()) throw InputError("empty event id", ptr + "/id");
    if (ev.id == kEpsilonEvent) throw InputError("event id '" + ev.id + "' is reserved", ptr + "/id");
    if (!event_ids.insert(ev.id).second) throw InputError("duplicate event id '" + ev.id + "'", ptr + "/id");
    const Json& label = detail::field(events[i], "label", ptr);
    if (label.is_string()) {
      ev.label = label.get<std::string>();
      if (ev.label->empty()) throw InputError("empty label (use null for ε)", ptr + "/label");
      if (std::find(used_labels.begin(), used_labels.end(), *ev.label) == used_labels.end()) {
        used_labels.push_back(*ev.label);
      }
    } else if (!label.is_null()) {
      throw InputError("label must be a string or null", ptr + "/label");
    }
    if (detail::bool_field(events[i], "faulty", ptr)) fault_names.push_back(ev.id);
    raw.events.push_back(std::move(ev));
  }

  if (auto it = doc.find("outputs"); it != doc.end()) {
    if (!it->is_array()) throw InputError("expected an array", "/outputs");
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const Json& a = (*it)[i];
      const std::string ptr = "/outputs/" + std::to_string(i);
      if (!a.is_string() || a.get<std::string>().empty()) throw InputError("expected a nonempty string", ptr);
      if (!seen.insert(a.get<std::string>()).second) throw InputError("duplicate output", ptr);
      raw.outputs.push_back(a.get<std::string>());
    }
    for (std::size_t i = 0; i < raw.events.size(); ++i) {
      if (raw.events[i].label && !seen.count(*raw.events[i].label)) {
        throw InputError("label '" + *raw.events[i].label + "' is not a declared output",
                         "/events/" + std::to_string(i) + "/label");
      }
    }
  } else {
    raw.outputs = used_labels;
  }

  const Json& transitions = detail::array_field(doc, "transitions", "");
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const std::string ptr = "/transitions/" + std::to_string(i);
    if (!transitions[i].is_object()) throw InputError("expected an object", ptr);
    detail::only_fields(transitions[i], {"from", "event", "to"}, ptr, strict);
    RawLfsa::Edge edge{detail::string_field(transitions[i], "from", ptr),
                       detail::string_field(transitions[i], "event", ptr),
                       detail::string_field(transitions[i], "to", ptr)};
    if (!state_ids.count(edge.from)) throw InputError("undeclared state '" + edge.from + "'", ptr + "/from");
    if (!event_ids.count(edge.event)) throw InputError("undeclared event '" + edge.event + "'", ptr + "/event");
    if (!state_ids.count(edge.to)) throw InputError("undeclared state '" + edge.to + "'", ptr + "/to");
    raw.transitions.push_back(std::move(edge));
  }

  ParsedModel out;
  try {
    out.model = validate(raw);
  } catch (const InputError&) {
    throw;
  } catch (const ModelError& e) {
    throw InputError(e.what(), "/");
  }
  std::vector<StateId> secret;
  for (const auto& s : secret_names) secret.push_back(*out.model.find_state(s));
  out.secrets.secret = StateSet(std::move(secret));
  for (const auto& f : fault_names) out.faults.faulty.push_back(*out.model.find_event(f));
  std::sort(out.faults.faulty.begin(), out.faults.faulty.end());
  return out;
}

inline ParsedModel load_model(const std::string& path, bool strict = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str(), strict);
}

/// Canonical document: outputs always listed, transitions in canonical order.
inline Json model_to_json(const Lfsa& model, const FaultSpec& faults = {}, const SecretSpec& secrets = {}) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["outputs"] = model.output_names();
  Json states = Json::array();
  for (StateId q = 0; q < model.num_states(); ++q) {
    states.push_back(
        {{"id", model.state_name(q)}, {"initial", model.initial().contains(q)}, {"secret", secrets.secret.contains(q)}});
  }
  doc["states"] = std::move(states);
  Json events = Json::array();
  for (EventId e = 0; e < model.num_events(); ++e) {
    Json label = model.observable(e) ? Json(model.output_name(model.label(e))) : Json(nullptr);
    events.push_back({{"id", model.event_name(e)}, {"label", label}, {"faulty", faults.contains(e)}});
  }
  doc["events"] = std::move(events);
  Json transitions = Json::array();
  for (const Transition& t : model.transitions()) {
    transitions.push_back(
        {{"from", model.state_name(t.from)}, {"event", model.event_name(t.event)}, {"to", model.state_name(t.to)}});
  }
  doc["transitions"] = std::move(transitions);
  return doc;
}

inline std::string serialize_model(const Lfsa& model, const FaultSpec& faults = {}, const SecretSpec& secrets = {}) {
  return model_to_json(model, faults, secrets).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Witnesses and verdicts.

namespace detail {

inline Json event_or_null(const Lfsa& m, const std::optional<EventId>& e) {
  return e ? Json(m.event_name(*e)) : Json(nullptr);
}

inline Json step_json(const Lfsa& m, const PairStep& s) {
  const std::string eps(kEpsilonText);
  return {{"from", pair_name(m.state_name(s.left_from), m.state_name(s.right_from))},
          {"event", pair_name(s.left_event ? m.event_name(*s.left_event) : eps,
                              s.right_event ? m.event_name(*s.right_event) : eps)},
          {"to", pair_name(m.state_name(s.left_to), m.state_name(s.right_to))}};
}

inline Json steps_json(const Lfsa& m, const std::vector<PairStep>& steps) {
  Json out = Json::array();
  for (const PairStep& s : steps) out.push_back(step_json(m, s));
  return out;
}

inline Json transition_json(const Lfsa& m, const Transition& t) {
  return {{"from", m.state_name(t.from)}, {"event", m.event_name(t.event)}, {"to", m.state_name(t.to)}};
}

inline Json transitions_json(const Lfsa& m, const std::vector<Transition>& run) {
  Json out = Json::array();
  for (const Transition& t : run) out.push_back(transition_json(m, t));
  return out;
}

inline Json labels_json(const Lfsa& m, const std::vector<LabelId>& w) {
  Json out = Json::array();
  for (LabelId a : w) out.push_back(m.output_name(a));
  return out;
}

/// Left and right projections of a product run, as event names.
inline Json projection(const Lfsa& m, std::initializer_list<const std::vector<PairStep>*> segments,
                       const std::optional<PairStep>& fault_after_first) {
  Json left = Json::array(), right = Json::array(), observation = Json::array();
  auto add = [&](const PairStep& s) {
    if (s.left_event) left.push_back(m.event_name(*s.left_event));
    if (s.right_event) right.push_back(m.event_name(*s.right_event));
    if (s.left_event && s.right_event) observation.push_back(m.output_name(m.label(*s.left_event)));
  };
  bool first = true;
  for (const auto* seg : segments) {
    for (const PairStep& s : *seg) add(s);
    if (first && fault_after_first) add(*fault_after_first);
    first = false;
  }
  return {{"left", left}, {"right", right}, {"observation", observation}};
}

}  // namespace detail

inline Json witness_to_json(const Lfsa& m, const InferenceWitness& w) {
  Json out;
  out["prefix"] = detail::steps_json(m, w.prefix);
  if (w.fault_step) out["fault_step"] = detail::step_json(m, *w.fault_step);
  if (!w.connector.empty() || w.fault_step) out["connector"] = detail::steps_json(m, w.connector);
  if (!w.cycle.empty()) out["cycle"] = detail::steps_json(m, w.cycle);
  if (!w.suffix.empty() || !w.cycle.empty()) out["suffix"] = detail::steps_json(m, w.suffix);
  if (w.model_fault) out["model_fault"] = detail::transition_json(m, *w.model_fault);
  if (!w.model_cycle.empty()) {
    out["model_path"] = detail::transitions_json(m, w.model_path);
    out["model_cycle"] = detail::transitions_json(m, w.model_cycle);
  }
  out["pump_count"] = w.pump_count;
  out["projection"] = detail::projection(m, {&w.prefix, &w.connector, &w.cycle, &w.suffix}, w.fault_step);
  return out;
}

inline Json witness_to_json(const Lfsa& m, const OpacityWitness& w) {
  Json out;
  out["observation"] = detail::labels_json(m, w.observation);
  out["split"] = w.split;
  out["secret_state"] = m.state_name(w.secret_state);
  if (w.violating_left) {
    Json est = Json::array();
    for (StateId q : w.violating_estimate) est.push_back(m.state_name(q));
    out["violating_state"] = {{"left", m.state_name(*w.violating_left)}, {"estimate", est}};
  }
  return out;
}

inline Json counterexample_to_json(const Lfsa& m, const Counterexample& c) {
  return {{"property", std::string(property_name(c.property))},
          {"observation", detail::labels_json(m, c.observation)},
          {"split", c.split}};
}

inline Json statistics_json(const Statistics& s) {
  return {{"observer_states", s.observer_states},
          {"product_states", s.product_states},
          {"product_transitions", s.product_transitions}};
}

inline Json parameters_json(const Lfsa& m, const PropertyInstance& inst, std::optional<std::uint64_t> effective_k) {
  Json p = Json::object();
  if (inst.property == Property::kDiagnosability || inst.property == Property::kPredictability) {
    Json f = Json::array();
    for (EventId e : inst.faults.faulty) f.push_back(m.event_name(e));
    p["faults"] = f;
  }
  if (!is_inference(inst.property)) {
    Json s = Json::array();
    for (StateId q : inst.secrets.secret) s.push_back(m.state_name(q));
    p["secrets"] = s;
  }
  if (inst.k) p["k"] = *inst.k;
  if (effective_k) p["effective_k"] = *effective_k;
  return p;
}

inline Json verdict_to_json(const Lfsa& m, const PropertyInstance& inst, const InferenceVerdict& v) {
  return {{"property", std::string(property_name(inst.property))},
          {"parameters", parameters_json(m, inst, std::nullopt)},
          {"holds", v.holds},
          {"witness", v.witness ? witness_to_json(m, *v.witness) : Json(nullptr)},
          {"statistics", statistics_json(v.stats)}};
}

inline Json verdict_to_json(const Lfsa& m, const PropertyInstance& inst, const OpacityVerdict& v) {
  return {{"property", std::string(property_name(inst.property))},
          {"parameters", parameters_json(m, inst, v.effective_k)},
          {"holds", v.holds},
          {"witness", v.witness ? witness_to_json(m, *v.witness) : Json(nullptr)},
          {"statistics", statistics_json(v.stats)}};
}

}  // namespace desv
