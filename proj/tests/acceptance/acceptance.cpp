// Acceptance suite. Prints one PASS/FAIL line per criterion; with an argument
// runs only that criterion. Exit status is nonzero if any selected criterion
// fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "desv/desv.hpp"

using namespace desv;

namespace {

// Pinned limits.
constexpr double kInvocationSeconds = 1.0;
constexpr double kRandomSuiteSeconds = 60.0;
constexpr std::size_t kSuiteSize = 600;
constexpr std::size_t kMinimumSuiteSize = 500;
constexpr std::size_t kMaxStates = 6;
constexpr std::size_t kMaxEvents = 5;
constexpr std::uint64_t kSuiteSeedBase = 0x5EED0000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Result {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (failures.size() < 8) failures.push_back(what);
    }
  }
};

std::string models_dir() { return DESV_MODELS_DIR; }
std::string model_path(const std::string& name) { return models_dir() + "/" + name + ".json"; }

struct Process {
  int code = -1;
  std::string out;
  double seconds = 0;
};

Process run_cli(const std::string& args) {
  Process p;
  const auto start = Clock::now();
  FILE* pipe = ::popen((std::string(DESV_CLI) + " " + args + " 2>/dev/null").c_str(), "r");
  if (!pipe) return p;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) p.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  p.seconds = seconds_since(start);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

SecretSpec secrets(const Lfsa& m, std::initializer_list<const char*> names) {
  std::vector<StateId> ids;
  for (const char* n : names) ids.push_back(*m.find_state(n));
  return SecretSpec{StateSet(std::move(ids))};
}

using Edge = std::tuple<std::string, std::string, std::string>;

std::set<Edge> edges(const Lfsa& m) {
  std::set<Edge> out;
  for (const Transition& t : m.transitions()) {
    out.emplace(m.state_name(t.from), m.event_name(t.event), m.state_name(t.to));
  }
  return out;
}

std::set<std::string> names(const Lfsa& m) { return {m.state_names().begin(), m.state_names().end()}; }

// ---------------------------------------------------------------------------

Result criterion_1() {
  struct Case {
    std::string model, property, secret;
    int expected;
  };
  const std::vector<Case> cases = {
      {"s2", "star-sd", "", 1},       {"s2", "omega-sd", "", 1},   {"s3", "diag", "", 1},
      {"s3", "pred", "", 1},          {"s2", "cso", "q2", 0},      {"s2", "iso", "q0", 1},
      {"s2", "infso", "q2", 0},       {"s2", "infso", "q1", 1},    {"s5", "infso", "", 0},
      {"s5", "sinfso", "", 1},        {"s4", "cso", "", 0},        {"s4", "scso", "", 1},
  };
  Result r;
  double slowest = 0;
  for (const Case& c : cases) {
    std::string args = "verify " + model_path(c.model) + " --property " + c.property + " --json";
    if (!c.secret.empty()) args += " --secret " + c.secret;
    const Process p = run_cli(args);
    slowest = std::max(slowest, p.seconds);
    r.expect(p.code == c.expected, c.model + " " + c.property + (c.secret.empty() ? "" : " {" + c.secret + "}") +
                                       ": exit " + std::to_string(p.code) + ", expected " + std::to_string(c.expected));
    r.expect(p.seconds < kInvocationSeconds, c.model + " " + c.property + " took " + std::to_string(p.seconds) + " s");
  }
  std::ostringstream d;
  d << cases.size() << " verdicts, slowest invocation " << slowest << " s (limit " << kInvocationSeconds << " s)";
  r.detail = d.str();
  return r;
}

Result criterion_2() {
  Result r;
  const ParsedModel s6 = load_model(model_path("s6"));
  const ParsedModel s7 = load_model(model_path("s7"));
  const EventId f6 = s6.faults.faulty.at(0), f7 = s7.faults.faulty.at(0);
  const bool s6_cc = check_diagnosability(s6.model, s6.faults).holds;
  const bool s6_tp = check_diag_twin_plant(s6.model, f6).holds;
  const bool s7_cc = check_diagnosability(s7.model, s7.faults).holds;
  const bool s7_gtp = check_diag_generalized_twin_plant(s7.model, f7).holds;
  const bool s7_yl = check_diag_yl_verifier(s7.model, f7).holds;
  r.expect(!s6_cc, "S6: concurrent composition should report not diagnosable");
  r.expect(s6_tp, "S6: twin plant should report diagnosable (vacuously)");
  r.expect(s7_cc, "S7: concurrent composition should report diagnosable");
  r.expect(s7_gtp, "S7: generalized twin plant should report diagnosable");
  r.expect(!s7_yl, "S7: verifier should report not diagnosable");
  r.detail = "S6 cc=" + std::string(s6_cc ? "true" : "false") + " twin=" + (s6_tp ? "true" : "false") +
             "; S7 cc=" + (s7_cc ? "true" : "false") + " gtp=" + (s7_gtp ? "true" : "false") +
             " verifier=" + (s7_yl ? "true" : "false");
  return r;
}

Result criterion_3() {
  Result r;
  const Lfsa s2 = load_model(model_path("s2")).model;

  const ObserverAutomaton obs = build_observer(s2);
  const Lfsa lifted = lift_observer(obs);
  r.expect(obs.states.size() == 4, "observer of S2 has " + std::to_string(obs.states.size()) + " states");
  r.expect(edges(lifted) == std::set<Edge>{{"{q0}", "a", "{q0}"},
                                           {"{q0}", "b", "{q1,q2}"},
                                           {"{q1,q2}", "a", "∅"},
                                           {"{q1,q2}", "b", "{q1}"},
                                           {"{q1}", "a", "∅"},
                                           {"{q1}", "b", "{q1}"},
                                           {"∅", "a", "∅"},
                                           {"∅", "b", "∅"}},
           "observer of S2 edges differ");

  const ProductAutomaton cc2 = self_composition(s2);
  r.expect(names(cc2.automaton) == std::set<std::string>{"(q0,q0)", "(q1,q2)", "(q1,q1)", "(q2,q1)", "(q2,q2)"},
           "self-composition of S2 states differ");
  r.expect(edges(cc2.automaton) == std::set<Edge>{{"(q0,q0)", "(e1,e1)", "(q0,q0)"},
                                                  {"(q0,q0)", "(e2,ε)", "(q0,q0)"},
                                                  {"(q0,q0)", "(ε,e2)", "(q0,q0)"},
                                                  {"(q0,q0)", "(e3,e4)", "(q1,q2)"},
                                                  {"(q0,q0)", "(e3,e3)", "(q1,q1)"},
                                                  {"(q0,q0)", "(e4,e3)", "(q2,q1)"},
                                                  {"(q0,q0)", "(e4,e4)", "(q2,q2)"},
                                                  {"(q1,q1)", "(e5,e5)", "(q1,q1)"}},
           "self-composition of S2 edges differ");

  const ParsedModel s3 = load_model(model_path("s3"));
  const ProductAutomaton fn = concurrent_composition(faulty_subautomaton(s3.model, s3.faults).automaton,
                                                     normal_subautomaton(s3.model, s3.faults).automaton);
  const auto fn_edges = edges(fn.automaton);
  for (const Edge& e : std::set<Edge>{{"(q0,q0)", "(e1,e1)", "(q1,q2)"},
                                      {"(q1,q2)", "(e2,e2)", "(q3,q4)"},
                                      {"(q3,q4)", "(ε,u)", "(q3,q4)"},
                                      {"(q3,q4)", "(f,ε)", "(q5,q4)"},
                                      {"(q5,q4)", "(ε,u)", "(q5,q4)"},
                                      {"(q5,q4)", "(u,ε)", "(q5,q4)"}}) {
    r.expect(fn_edges.count(e), "CC(S3f,S3n) lacks " + std::get<0>(e) + " -" + std::get<1>(e) + "-> " + std::get<2>(e));
  }
  // Outside the fragment, the only extra states are those through (q1,q1).
  std::set<std::string> extra;
  for (const auto& n : names(fn.automaton)) {
    if (!std::set<std::string>{"(q0,q0)", "(q1,q2)", "(q3,q4)", "(q5,q4)"}.count(n)) extra.insert(n);
  }
  r.expect(extra == std::set<std::string>{"(q1,q1)", "(q3,q3)", "(q5,q3)"}, "CC(S3f,S3n) has unexpected states");

  // The seeds depend on the secret set, so the fragment is the union over {q1} and {q2}.
  std::set<Edge> oc;
  std::set<std::string> oc_states;
  for (const char* q : {"q1", "q2"}) {
    const ProductAutomaton p = observer_product(s2, secrets(s2, {q}));
    oc.merge(edges(p.automaton));
    oc_states.merge(names(p.automaton));
  }
  const std::string eps(kEpsilonEvent);
  for (const Edge& e : std::set<Edge>{{"(q0,{q0})", "(b,b)", "(q2,{q1,q2})"},
                                      {"(q0,{q0})", "(b,b)", "(q1,{q1,q2})"},
                                      {"(q0,{q0})", "(a,a)", "(q0,{q0})"},
                                      {"(q0,{q0})", "(" + eps + ",ε)", "(q0,{q0})"},
                                      {"(q1,{q1,q2})", "(b,b)", "(q1,{q1})"},
                                      {"(q1,{q1})", "(b,b)", "(q1,{q1})"},
                                      {"(q1,{q2})", "(b,b)", "(q1,∅)"},
                                      {"(q1,∅)", "(b,b)", "(q1,∅)"}}) {
    r.expect(oc.count(e), "CC(S2eps,S2obs^eps) lacks " + std::get<0>(e) + " -" + std::get<1>(e) + "-> " +
                              std::get<2>(e));
  }
  r.expect(oc_states.count("(q2,{q1})"), "CC(S2eps,S2obs^eps) lacks (q2,{q1})");
  r.detail = "observer 4 states, self-composition 5 states, CC(S3f,S3n) and CC(S2eps,S2obs^eps) fragments";
  return r;
}

// ---------------------------------------------------------------------------
// Random suite shared by criteria 4 to 6.

struct Case {
  std::uint64_t seed;
  GeneratedModel g;
  std::uint64_t k;
};

std::vector<Case> random_suite() {
  std::vector<Case> out;
  for (std::uint64_t i = 0; out.size() < kSuiteSize; ++i) {
    GeneratorParams p;
    p.states = 1 + i % kMaxStates;
    p.events = 1 + (i / kMaxStates) % kMaxEvents;
    p.seed = kSuiteSeedBase + i;
    p.in_scope = i % 3 == 0;
    p.live = i % 5 < 2;
    p.divergence_free = i % 5 < 2;
    p.initial_count = 1 + i % 2;
    p.transition_density = 0.25 + 0.05 * static_cast<double>(i % 4);
    try {
      out.push_back({p.seed, random_lfsa(p), 1 + i % 4});
    } catch (const GeneratorError&) {
    }
  }
  return out;
}

std::optional<std::uint64_t> k_for(Property p, std::uint64_t k) {
  return needs_k(p) ? std::optional<std::uint64_t>(k) : std::nullopt;
}

bool in_legacy_scope(const Lfsa& m, const FaultSpec& f) {
  if (f.faulty.size() != 1) return false;
  try {
    detail::check_legacy_scope(m, f.faulty[0]);
  } catch (const LegacyScopeError&) {
    return false;
  }
  return true;
}

Result criterion_4() {
  Result r;
  const auto start = Clock::now();
  const auto suite = random_suite();
  std::size_t witnesses = 0, searches = 0, gtp = 0, classic = 0;
  for (const Case& c : suite) {
    const Lfsa& m = c.g.model;
    const std::string tag = "seed " + std::to_string(c.seed) + ": ";
    const std::size_t bound = 2 * m.num_states() * m.num_states() + 2;
    for (Property p : kAllProperties) {
      const PropertyInstance inst{p, c.g.faults, c.g.secrets, k_for(p, c.k)};
      const Verdict v = check_property(m, inst);
      const std::string what = tag + std::string(property_name(p));
      if (!holds(v)) {
        DefinitionalClaim claim{inst, {}};
        if (const auto* iv = std::get_if<InferenceVerdict>(&v)) {
          claim.witness = *iv->witness;
        } else {
          claim.witness = *std::get<OpacityVerdict>(v).witness;
        }
        try {
          const ClaimCheck check = validate_witness(m, claim);
          r.expect(check.valid, what + " witness rejected: " + check.explanation);
        } catch (const std::exception& e) {
          r.expect(false, what + " witness malformed: " + e.what());
        }
        ++witnesses;
      } else {
        try {
          const auto cex = bounded_definitional_search(m, inst, bound);
          r.expect(!cex, what + " holds but the oracle found a counterexample");
        } catch (const BudgetExceeded& e) {
          r.expect(false, what + " oracle budget exceeded");
        }
        ++searches;
      }
    }
    if (in_legacy_scope(m, c.g.faults)) {
      const EventId f = c.g.faults.faulty[0];
      const bool diag = check_diagnosability(m, c.g.faults).holds;
      r.expect(diag == check_diag_generalized_twin_plant(m, f).holds, tag + "generalized twin plant disagrees");
      ++gtp;
      if (detail::reachable_live(m) && detail::divergence_free(m)) {
        r.expect(diag == check_diag_twin_plant(m, f).holds, tag + "twin plant disagrees");
        r.expect(diag == check_diag_yl_verifier(m, f).holds, tag + "verifier disagrees");
        ++classic;
      }
    }
  }
  const double elapsed = seconds_since(start);
  r.expect(suite.size() >= kMinimumSuiteSize, "suite has only " + std::to_string(suite.size()) + " models");
  r.expect(elapsed < kRandomSuiteSeconds, "suite took " + std::to_string(elapsed) + " s");
  std::ostringstream d;
  d << suite.size() << " models, " << witnesses << " witnesses validated, " << searches << " bounded searches, " << gtp
    << " generalized twin plant and " << classic << " twin plant/verifier comparisons, " << elapsed << " s (limit "
    << kRandomSuiteSeconds << " s)";
  r.detail = d.str();
  return r;
}

std::uint64_t stabilization(std::size_t n) {
  if (n >= 63) return std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t b = std::uint64_t{1} << n;
  return b >= 3 ? b - 2 : 1;
}

Result criterion_5() {
  Result r;
  const auto suite = random_suite();
  std::size_t checks = 0;
  for (const Case& c : suite) {
    const Lfsa& m = c.g.model;
    const SecretSpec& s = c.g.secrets;
    const std::string tag = "seed " + std::to_string(c.seed) + ": ";
    auto verdict = [&](Property p, std::optional<std::uint64_t> k = std::nullopt) {
      return check_opacity(m, {p, s, k}).holds;
    };
    const std::uint64_t kso_cap = stabilization(m.num_states());
    const std::uint64_t skso_cap = stabilization(m.num_states() - s.secret.size());

    for (auto [variant, cap, limit] : {std::tuple{Property::kKStepOpacity, kso_cap, Property::kInfiniteStepOpacity},
                                       std::tuple{Property::kStrongKStepOpacity, skso_cap,
                                                  Property::kStrongInfiniteStepOpacity}}) {
      const std::string name(property_name(variant));
      bool previous = true;
      for (std::uint64_t k = 1; k <= std::min<std::uint64_t>(cap + 1, 12); ++k) {
        const bool now = verdict(variant, k);
        r.expect(previous || !now, tag + name + " not monotone at K=" + std::to_string(k));
        previous = now;
        ++checks;
      }
      r.expect(verdict(variant, cap) == verdict(limit),
               tag + name + "(" + std::to_string(cap) + ") differs from " + std::string(property_name(limit)));
      ++checks;
    }
    const std::array<std::pair<Property, Property>, 4> implied = {
        std::pair{Property::kStrongCurrentStateOpacity, Property::kCurrentStateOpacity},
        std::pair{Property::kStrongInitialStateOpacity, Property::kInitialStateOpacity},
        std::pair{Property::kStrongInfiniteStepOpacity, Property::kInfiniteStepOpacity},
        std::pair{Property::kStrongKStepOpacity, Property::kKStepOpacity}};
    for (auto [strong, standard] : implied) {
      const auto k = k_for(strong, c.k);
      r.expect(!verdict(strong, k) || verdict(standard, k),
               tag + std::string(property_name(strong)) + " holds but " + std::string(property_name(standard)) +
                   " fails");
      ++checks;
    }
    const bool omega = check_strong_detectability(m, DetectabilityVariant::kOmega).holds;
    const bool star = check_strong_detectability(m, DetectabilityVariant::kStar).holds;
    r.expect(omega || !star, tag + "omega-sd fails but star-sd holds");
    ++checks;
  }
  r.detail = std::to_string(suite.size()) + " models, " + std::to_string(checks) + " implication checks";
  return r;
}

/// Tag-erased generalized twin plant versus CC(left, right): the erasure must
/// be a bijection onto the product states that maps edges onto edges.
bool erased_isomorphic(const Lfsa& model, const TaggedProduct& gtp, const ProductAutomaton& cc,
                       const SubautomatonReport* left, const SubautomatonReport* right) {
  auto orig_l = [&](StateId q) { return left ? left->to_original(q) : q; };
  auto orig_r = [&](StateId q) { return right ? right->to_original(q) : q; };
  std::map<std::pair<StateId, StateId>, StateId> cc_index;
  for (StateId i = 0; i < cc.states.size(); ++i) cc_index[{orig_l(cc.states[i].left), orig_r(cc.states[i].right)}] = i;
  std::set<std::pair<StateId, StateId>> erased;
  for (const TaggedState& t : gtp.states) erased.insert({t.x1, t.x2});
  if (erased.size() != gtp.states.size()) return false;
  if (erased.size() != cc_index.size()) return false;
  for (const auto& pair : erased) {
    if (!cc_index.count(pair)) return false;
  }
  auto edge_set = [&](const Lfsa& a, auto state_of) {
    std::set<std::tuple<std::pair<StateId, StateId>, std::string, std::pair<StateId, StateId>>> out;
    for (const Transition& t : a.transitions()) out.emplace(state_of(t.from), a.event_name(t.event), state_of(t.to));
    return out;
  };
  const auto g = edge_set(gtp.automaton, [&](StateId i) { return std::pair{gtp.states[i].x1, gtp.states[i].x2}; });
  const auto p = edge_set(cc.automaton, [&](StateId i) {
    return std::pair{orig_l(cc.states[i].left), orig_r(cc.states[i].right)};
  });
  (void)model;
  return g == p;
}

/// Same comparison on the quotient: distinct tags over one pair are merged.
bool erased_quotient_equal(const TaggedProduct& gtp, const ProductAutomaton& cc, const SubautomatonReport& right) {
  std::set<std::tuple<StateId, StateId, std::string, StateId, StateId>> g, p;
  for (const Transition& t : gtp.automaton.transitions()) {
    const TaggedState& a = gtp.states[t.from];
    const TaggedState& b = gtp.states[t.to];
    g.emplace(a.x1, a.x2, gtp.automaton.event_name(t.event), b.x1, b.x2);
  }
  for (const Transition& t : cc.automaton.transitions()) {
    const ProductState& a = cc.states[t.from];
    const ProductState& b = cc.states[t.to];
    p.emplace(a.left, right.to_original(a.right), cc.automaton.event_name(t.event), b.left,
              right.to_original(b.right));
  }
  return g == p;
}

Result criterion_6() {
  Result r;
  const auto suite = random_suite();
  std::size_t in_scope = 0, isomorphic = 0, quotient = 0;
  std::string first_counterexample;
  for (const Case& c : suite) {
    const Lfsa& m = c.g.model;
    const std::string tag = "seed " + std::to_string(c.seed) + ": ";
    const std::size_t n = m.num_states();
    const ObserverAutomaton obs = build_observer(m);
    r.expect(n >= 63 || obs.states.size() <= (std::uint64_t{1} << n), tag + "observer exceeds 2^|Q|");
    const ProductAutomaton self = self_composition(m);
    r.expect(self.states.size() <= n * n, tag + "self-composition exceeds |Q|^2");
    const SubautomatonReport sf = faulty_subautomaton(m, c.g.faults);
    const SubautomatonReport sn = normal_subautomaton(m, c.g.faults);
    const ProductAutomaton fn = concurrent_composition(sf.automaton, sn.automaton);
    r.expect(fn.states.size() <= sf.automaton.num_states() * sn.automaton.num_states(),
             tag + "CC(Sf,Sn) exceeds |Qf||Qn|");
    const ProductAutomaton oc = observer_product(m, c.g.secrets);
    r.expect(n >= 63 || oc.states.size() <= n * (std::uint64_t{1} << n), tag + "observer product exceeds |Q|2^|Q|");
    const ProductAutomaton dss = dss_observer_product(m, c.g.secrets);
    const ObserverAutomaton dss_obs = build_observer(delete_secret(m, c.g.secrets).automaton);
    r.expect(dss.states.size() <= n * dss_obs.states.size(), tag + "dss observer product exceeds |Q||Qdssobs|");

    if (in_legacy_scope(m, c.g.faults)) {
      ++in_scope;
      const TaggedProduct gtp = build_generalized_twin_plant(m, c.g.faults.faulty[0]);
      const bool iso = erased_isomorphic(m, gtp, fn, &sf, &sn);
      if (iso) {
        ++isomorphic;
      } else if (first_counterexample.empty()) {
        first_counterexample = tag + "GTP " + std::to_string(gtp.states.size()) + " states, CC(Sf,Sn) " +
                               std::to_string(fn.states.size());
      }
      r.expect(iso, tag + "tag-erased generalized twin plant is not isomorphic to CC(Sf,Sn)");
      if (erased_quotient_equal(gtp, concurrent_composition(m, sn.automaton), sn)) ++quotient;
    }
  }
  // The shipped S7 model.
  const ParsedModel s7 = load_model(model_path("s7"));
  const TaggedProduct gtp7 = build_generalized_twin_plant(s7.model, s7.faults.faulty[0]);
  const SubautomatonReport sf7 = faulty_subautomaton(s7.model, s7.faults);
  const SubautomatonReport sn7 = normal_subautomaton(s7.model, s7.faults);
  const ProductAutomaton fn7 = concurrent_composition(sf7.automaton, sn7.automaton);
  r.expect(erased_isomorphic(s7.model, gtp7, fn7, &sf7, &sn7),
           "S7: generalized twin plant has " + std::to_string(gtp7.states.size()) + " states, CC(Sf,Sn) has " +
               std::to_string(fn7.states.size()));

  std::ostringstream d;
  d << suite.size() << " models; size bounds checked; tag-erased isomorphism on " << isomorphic << "/" << in_scope
    << " in-scope models";
  if (!first_counterexample.empty()) d << " (first mismatch " << first_counterexample << ")";
  d << "; informational: erased quotient equals CC(S,Sn) on " << quotient << "/" << in_scope;
  r.detail = d.str();
  return r;
}

Result criterion_7() {
  Result r;
  std::vector<std::string> commands;
  for (const char* m : {"s1", "s2", "s3", "s4", "s5", "s6", "s7"}) {
    commands.push_back("verify " + model_path(m) + " --all-properties --k 3 --json");
    commands.push_back("build " + model_path(m) + " --artifact cc-obs --format json");
    commands.push_back("build " + model_path(m) + " --artifact self-composition --format json");
    commands.push_back("oracle " + model_path(m) + " --property sinfso --bound 6 --json");
  }
  for (const char* p : {"star-sd", "omega-sd", "diag", "pred", "cso", "iso", "infso", "scso", "siso", "sinfso"}) {
    commands.push_back("verify " + model_path("s3") + " --property " + p + " --json");
  }
  commands.push_back("verify " + model_path("s2") + " --property kso --k 4 --secret q1 --json");
  commands.push_back("verify " + model_path("s5") + " --property skso --k 2 --json");
  commands.push_back("build " + model_path("s7") + " --artifact gtp --format json");
  commands.push_back("build " + model_path("s3") + " --artifact cc-fn --format json");
  commands.push_back("gen --states 6 --events 4 --seed 7 --live");
  commands.push_back("gen --states 5 --events 5 --seed 11 --in-scope --divergence-free");
  for (const auto& cmd : commands) {
    const Process a = run_cli(cmd);
    const Process b = run_cli(cmd);
    r.expect(a.code == b.code && a.out == b.out, "output differs: " + cmd);
    r.expect(!a.out.empty(), "no output: " + cmd);
    try {
      r.expect(!Json::parse(a.out).is_null(), "empty JSON: " + cmd);
    } catch (const std::exception&) {
      r.expect(false, "not JSON: " + cmd);
    }
  }
  r.detail = std::to_string(commands.size()) + " commands run twice, outputs compared byte for byte";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Result()>>> criteria = {
      {1, {"verdict regression", criterion_1}},
      {2, {"legacy method discrepancies", criterion_2}},
      {3, {"structure regression", criterion_3}},
      {4, {"randomized cross-validation", criterion_4}},
      {5, {"corollary checks", criterion_5}},
      {6, {"structural bounds", criterion_6}},
      {7, {"determinism", criterion_7}},
  };
  std::vector<int> selected;
  if (argc > 1) {
    selected.push_back(std::atoi(argv[1]));
    if (!criteria.count(selected[0])) {
      std::cerr << "unknown criterion " << argv[1] << "\n";
      return 2;
    }
  } else {
    for (const auto& [id, entry] : criteria) selected.push_back(id);
  }
  bool all = true;
  for (int id : selected) {
    const auto& [title, fn] = criteria.at(id);
    Result res;
    try {
      res = fn();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    std::cout << "criterion " << id << " " << (res.pass ? "PASS" : "FAIL") << " [" << title << "] " << res.detail
              << "\n";
    for (const auto& f : res.failures) std::cout << "    " << f << "\n";
    all = all && res.pass;
  }
  return all ? 0 : 1;
}
