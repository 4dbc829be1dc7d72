#pragma once

// Graphviz export. Every identifier is quoted; initial states get an arrow
// from an invisible point node.

#include <ostream>
#include <sstream>
#include <string>

#include "desv/derivations.hpp"
#include "desv/lfsa.hpp"

namespace desv {

inline std::string dot_quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': break;
      default: out += c;
    }
  }
  return out + "\"";
}

namespace detail {

inline std::string event_text(std::string_view name) {
  return name == kEpsilonEvent ? std::string("ε") : std::string(name);
}

inline void dot_header(std::ostream& out, std::string_view name) {
  out << "digraph " << dot_quote(name) << " {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=ellipse];\n";
}

inline void dot_initial(std::ostream& out, std::size_t i, const std::string& target) {
  out << "  " << dot_quote("__init" + std::to_string(i)) << " [shape=point, label=\"\"];\n";
  out << "  " << dot_quote("__init" + std::to_string(i)) << " -> " << dot_quote(target) << ";\n";
}

}  // namespace detail

/// Edges are captioned "e(l)", with ε for unobservable events.
inline void write_dot(std::ostream& out, const Lfsa& m, std::string_view name = "lfsa",
                      const StateSet& highlighted = {}) {
  detail::dot_header(out, name);
  for (StateId q = 0; q < m.num_states(); ++q) {
    out << "  " << dot_quote(m.state_name(q));
    if (highlighted.contains(q)) out << " [shape=doublecircle]";
    out << ";\n";
  }
  std::size_t i = 0;
  for (StateId q : m.initial()) detail::dot_initial(out, i++, m.state_name(q));
  for (const Transition& t : m.transitions()) {
    const std::string label = m.observable(t.event) ? m.output_name(m.label(t.event)) : "ε";
    out << "  " << dot_quote(m.state_name(t.from)) << " -> " << dot_quote(m.state_name(t.to))
        << " [label=" << dot_quote(detail::event_text(m.event_name(t.event)) + "(" + label + ")") << "];\n";
  }
  out << "}\n";
}

/// Observer states are rendered as sets, ∅ for the empty estimate.
inline void write_dot(std::ostream& out, const ObserverAutomaton& obs, std::string_view name = "observer") {
  auto state = [&](std::uint32_t x) { return obs.states[x].empty() ? std::string("∅") : obs.state_labels[x]; };
  detail::dot_header(out, name);
  for (std::uint32_t x = 0; x < obs.states.size(); ++x) out << "  " << dot_quote(state(x)) << ";\n";
  detail::dot_initial(out, 0, state(obs.initial));
  for (std::uint32_t x = 0; x < obs.states.size(); ++x) {
    for (std::size_t p = 0; p < obs.alphabet.size() && p < obs.delta[x].size(); ++p) {
      out << "  " << dot_quote(state(x)) << " -> " << dot_quote(state(obs.delta[x][p]))
          << " [label=" << dot_quote(obs.outputs.at(obs.alphabet[p])) << "];\n";
    }
  }
  out << "}\n";
}

template <typename T>
std::string to_dot(const T& graph, std::string_view name) {
  std::ostringstream out;
  write_dot(out, graph, name);
  return out.str();
}

}  // namespace desv
