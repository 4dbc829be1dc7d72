#pragma once

// Command-line front end. cli_main is a plain function over streams so tests
// can drive it without spawning processes.
//
// Exit codes: 0 property holds / artifact built, 1 property fails,
// 2 usage or input error.

#include <chrono>
#include <fstream>
#include <future>
#include <iostream>
#include <ostream>

#include <CLI11.hpp>

#include "desv/dot.hpp"
#include "desv/generator.hpp"
#include "desv/io.hpp"
#include "desv/legacy.hpp"
#include "desv/oracle.hpp"
#include "desv/verify.hpp"

namespace desv {

inline constexpr int kExitHolds = 0;
inline constexpr int kExitFails = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline FaultSpec fault_override(const Lfsa& m, const std::vector<std::string>& names) {
  FaultSpec f;
  for (const auto& n : names) {
    auto e = m.find_event(n);
    if (!e) throw UsageError("unknown event '" + n + "'");
    f.faulty.push_back(*e);
  }
  std::sort(f.faulty.begin(), f.faulty.end());
  f.faulty.erase(std::unique(f.faulty.begin(), f.faulty.end()), f.faulty.end());
  return f;
}

inline SecretSpec secret_override(const Lfsa& m, const std::vector<std::string>& names) {
  std::vector<StateId> ids;
  for (const auto& n : names) {
    auto q = m.find_state(n);
    if (!q) throw UsageError("unknown state '" + n + "'");
    ids.push_back(*q);
  }
  return SecretSpec{StateSet(std::move(ids))};
}

inline Property property_arg(const std::string& name) {
  auto p = parse_property(name);
  if (!p) throw UsageError("unknown property '" + name + "'");
  return *p;
}

inline std::string join(const Json& names, std::string_view sep = " ") {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += sep;
    out += n.get<std::string>();
  }
  return out.empty() ? "ε" : out;
}

inline void print_run(std::ostream& out, std::string_view title, const Json& steps) {
  if (steps.empty()) return;
  out << "  " << title << ":";
  for (const auto& s : steps) out << " " << s["from"].get<std::string>() << " -" << s["event"].get<std::string>() << "->";
  out << " " << steps.back()["to"].get<std::string>() << "\n";
}

inline void print_verdict(std::ostream& out, const Json& doc) {
  out << doc["property"].get<std::string>() << ": " << (doc["holds"].get<bool>() ? "holds" : "fails") << "\n";
  const Json& params = doc["parameters"];
  if (params.contains("faults")) out << "  faults: {" << join(params["faults"], ",") << "}\n";
  if (params.contains("secrets")) out << "  secrets: {" << join(params["secrets"], ",") << "}\n";
  if (params.contains("k")) {
    out << "  K: " << params["k"].get<std::uint64_t>() << " (explored " << params["effective_k"].get<std::uint64_t>()
        << ")\n";
  }
  const Json& w = doc["witness"];
  if (w.is_null()) return;
  if (w.contains("projection")) {
    print_run(out, "prefix", w["prefix"]);
    if (w.contains("fault_step")) print_run(out, "fault", Json::array({w["fault_step"]}));
    if (w.contains("connector")) print_run(out, "connector", w["connector"]);
    if (w.contains("cycle")) print_run(out, "cycle", w["cycle"]);
    if (w.contains("suffix")) print_run(out, "suffix", w["suffix"]);
    const Json& pr = w["projection"];
    out << "  left run: " << join(pr["left"]) << "\n";
    out << "  right run: " << join(pr["right"]) << "\n";
    out << "  observation: " << join(pr["observation"]) << "\n";
    if (w.contains("model_fault")) {
      const Json& f = w["model_fault"];
      out << "  fault transition: " << f["from"].get<std::string>() << " -" << f["event"].get<std::string>() << "-> "
          << f["to"].get<std::string>() << "\n";
    }
    if (w.contains("model_cycle")) {
      Json path = Json::array(), cyc = Json::array();
      for (const auto& t : w["model_path"]) path.push_back(t["event"]);
      for (const auto& t : w["model_cycle"]) cyc.push_back(t["event"]);
      out << "  infinite continuation: " << join(path) << " (" << join(cyc) << ")^ω\n";
    }
    out << "  cycle repetitions: " << w["pump_count"].get<std::uint64_t>() << "\n";
  } else {
    out << "  observation: " << join(w["observation"]) << " (split after " << w["split"].get<std::size_t>()
        << ")\n";
    out << "  secret state: " << w["secret_state"].get<std::string>() << "\n";
    if (w.contains("violating_state")) {
      const Json& est = w["violating_state"]["estimate"];
      out << "  product state: (" << w["violating_state"]["left"].get<std::string>() << ", "
          << (est.empty() ? std::string("∅") : "{" + join(est, ",") + "}") << ")\n";
    }
  }
}

inline Json verdict_document(const Lfsa& m, const PropertyInstance& inst, const Verdict& v) {
  return std::visit([&](const auto& x) { return verdict_to_json(m, inst, x); }, v);
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write '" + path + "'");
  file << text;
}

inline EventId single_fault(const FaultSpec& faults) {
  if (faults.faulty.size() != 1) throw UsageError("this artifact needs exactly one fault event (use --fault)");
  return faults.faulty.front();
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verification of detectability, diagnosability, predictability and opacity for labeled automata",
               "desv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "desv 1.0");

  std::string model_path, property, artifact, output, format = "dot";
  std::optional<std::uint64_t> k;
  std::vector<std::string> faults, secrets;
  bool json = false, timing = false, all = false, lenient = false;
  std::size_t bound = 0;
  GeneratorParams gen;

  auto* verify = app.add_subcommand("verify", "Decide a property");
  verify->add_option("model", model_path, "Model file (JSON)")->required();
  auto* prop_opt = verify->add_option("--property,-p", property, "Property to check");
  verify->add_flag("--all-properties", all, "Check every property the model supports");
  prop_opt->excludes("--all-properties");
  verify->add_option("--k", k, "K for kso / skso")->check(CLI::PositiveNumber);
  verify->add_option("--fault", faults, "Override the fault events")->delimiter(',');
  verify->add_option("--secret", secrets, "Override the secret states")->delimiter(',');
  verify->add_flag("--json", json, "Emit the verdict document as JSON");
  verify->add_flag("--timing", timing, "Include wall-clock time in the JSON output");
  verify->add_flag("--lenient", lenient, "Ignore unknown fields in the model file");

  auto* build = app.add_subcommand("build", "Write a derived automaton");
  build->add_option("model", model_path, "Model file (JSON)")->required();
  build->add_option("--artifact,-a", artifact, "Artifact to build")
      ->required()
      ->check(CLI::IsMember({"observer", "self-composition", "cc-fn", "cc-nn", "epsilon", "dss-observer", "twin-plant",
                             "yl-verifier", "gtp", "s-phi", "cc-obs", "cc-dss-obs"}));
  build->add_option("--fault", faults, "Override the fault events")->delimiter(',');
  build->add_option("--secret", secrets, "Override the secret states")->delimiter(',');
  build->add_option("-o,--output", output, "Output path (default stdout)");
  build->add_option("--format", format, "Output format")->check(CLI::IsMember({"dot", "json"}));
  build->add_flag("--lenient", lenient, "Ignore unknown fields in the model file");

  auto* orc = app.add_subcommand("oracle", "Bounded search for a definitional counterexample");
  orc->add_option("model", model_path, "Model file (JSON)")->required();
  orc->add_option("--property,-p", property, "Property to check")->required();
  orc->add_option("--bound", bound, "Maximum observation length")->required()->check(CLI::PositiveNumber);
  orc->add_option("--k", k, "K for kso / skso")->check(CLI::PositiveNumber);
  orc->add_option("--fault", faults, "Override the fault events")->delimiter(',');
  orc->add_option("--secret", secrets, "Override the secret states")->delimiter(',');
  orc->add_flag("--json", json, "Emit JSON");
  orc->add_flag("--lenient", lenient, "Ignore unknown fields in the model file");

  auto* g = app.add_subcommand("gen", "Generate a random model");
  g->add_option("--states", gen.states, "Number of states")->required();
  g->add_option("--events", gen.events, "Number of events")->required();
  g->add_option("--seed", gen.seed, "Random seed")->required();
  g->add_option("--outputs", gen.outputs, "Number of output symbols (0: automatic)");
  g->add_option("--initial", gen.initial_count, "Number of initial states");
  g->add_option("--observable-fraction", gen.observable_fraction)->check(CLI::Range(0.0, 1.0));
  g->add_option("--density", gen.transition_density, "Transition density")->check(CLI::Range(0.0, 1.0));
  g->add_option("--secret-density", gen.secret_density)->check(CLI::Range(0.0, 1.0));
  g->add_option("--fault-density", gen.fault_density)->check(CLI::Range(0.0, 1.0));
  g->add_flag("--live", gen.live, "Every reachable state has a successor");
  g->add_flag("--divergence-free", gen.divergence_free, "No reachable unobservable cycle");
  g->add_flag("--in-scope", gen.in_scope, "One initial state, identity labels, one fault 'f'");
  g->add_option("-o,--output", output, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitHolds : kExitUsage;
  }

  try {
    if (g->parsed()) {
      const GeneratedModel gm = random_lfsa(gen);
      detail::write_output(output, serialize_model(gm.model, gm.faults, gm.secrets), out);
      return kExitHolds;
    }

    const ParsedModel pm = load_model(model_path, !lenient);
    const Lfsa& m = pm.model;
    const FaultSpec fs = faults.empty() ? pm.faults : detail::fault_override(m, faults);
    const SecretSpec ss = secrets.empty() ? pm.secrets : detail::secret_override(m, secrets);

    if (verify->parsed()) {
      std::vector<Property> props;
      if (all) {
        for (Property p : kAllProperties) {
          if (needs_k(p) && !k) continue;
          props.push_back(p);
        }
      } else {
        if (property.empty()) throw UsageError("--property or --all-properties is required");
        props.push_back(detail::property_arg(property));
        if (needs_k(props[0]) && !k) throw UsageError(property + " needs --k");
      }
      struct Outcome {
        Json doc;
        bool holds;
      };
      auto run = [&](Property p) {
        PropertyInstance inst{p, fs, ss, needs_k(p) ? k : std::nullopt};
        const auto start = std::chrono::steady_clock::now();
        const Verdict v = check_property(m, inst);
        const auto stop = std::chrono::steady_clock::now();
        Json doc = detail::verdict_document(m, inst, v);
        if (timing) {
          doc["timing"] = {{"milliseconds", std::chrono::duration<double, std::milli>(stop - start).count()}};
        }
        return Outcome{std::move(doc), holds(v)};
      };
      std::vector<std::future<Outcome>> jobs;
      for (Property p : props) jobs.push_back(std::async(props.size() > 1 ? std::launch::async : std::launch::deferred, run, p));
      std::vector<Outcome> results;
      for (auto& j : jobs) results.push_back(j.get());

      bool every = true;
      for (const auto& r : results) every = every && r.holds;
      if (json) {
        if (all) {
          Json arr = Json::array();
          for (auto& r : results) arr.push_back(std::move(r.doc));
          out << arr.dump(2) << "\n";
        } else {
          out << results[0].doc.dump(2) << "\n";
        }
      } else {
        for (const auto& r : results) detail::print_verdict(out, r.doc);
      }
      return every ? kExitHolds : kExitFails;
    }

    if (orc->parsed()) {
      const Property p = detail::property_arg(property);
      if (needs_k(p) && !k) throw UsageError(property + " needs --k");
      PropertyInstance inst{p, fs, ss, needs_k(p) ? k : std::nullopt};
      const auto cex = bounded_definitional_search(m, inst, bound);
      if (json) {
        Json doc = {{"property", std::string(property_name(p))},
                    {"bound", bound},
                    {"counterexample", cex ? counterexample_to_json(m, *cex) : Json(nullptr)}};
        out << doc.dump(2) << "\n";
      } else if (cex) {
        out << property_name(p) << ": counterexample within bound " << bound << "\n";
        out << "  observation: " << detail::join(counterexample_to_json(m, *cex)["observation"]) << " (split after "
            << cex->split << ")\n";
      } else {
        out << property_name(p) << ": no counterexample up to observation length " << bound << "\n";
      }
      return cex ? kExitFails : kExitHolds;
    }

    // build
    std::string text;
    auto emit = [&](const Lfsa& a) {
      text = format == "json" ? serialize_model(a) : to_dot(a, artifact);
    };
    if (artifact == "observer" || artifact == "dss-observer") {
      const ObserverAutomaton obs =
          artifact == "observer" ? build_observer(m) : build_observer(delete_secret(m, ss).automaton);
      text = format == "json" ? serialize_model(lift_observer(obs, false)) : to_dot(obs, artifact);
    } else if (artifact == "self-composition") {
      emit(self_composition(m).automaton);
    } else if (artifact == "cc-fn") {
      emit(concurrent_composition(faulty_subautomaton(m, fs).automaton, normal_subautomaton(m, fs).automaton).automaton);
    } else if (artifact == "cc-nn") {
      emit(self_composition(normal_subautomaton(m, fs).automaton).automaton);
    } else if (artifact == "epsilon") {
      emit(epsilonize(m).automaton);
    } else if (artifact == "cc-obs") {
      emit(observer_product(m, ss).automaton);
    } else if (artifact == "cc-dss-obs") {
      emit(dss_observer_product(m, ss).automaton);
    } else {
      const EventId f = detail::single_fault(fs);
      if (artifact == "s-phi") emit(build_s_phi(m, f).automaton);
      if (artifact == "twin-plant") emit(build_twin_plant(m, f).automaton);
      if (artifact == "yl-verifier") emit(build_yl_verifier(m, f).automaton);
      if (artifact == "gtp") emit(build_generalized_twin_plant(m, f).automaton);
    }
    detail::write_output(output, text, out);
    return kExitHolds;
  } catch (const std::exception& e) {
    err << "desv: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace desv
