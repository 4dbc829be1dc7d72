#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "desv/cli.hpp"
#include "unit/dot_grammar.hpp"
#include "unit/support.hpp"

using namespace desv;
using namespace desv::test;

namespace {

std::string model_path(const std::string& name) { return std::string(DESV_MODELS_DIR) + "/" + name + ".json"; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "desv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string dot_error(const std::string& text) { return DotRecognizer(text).check(); }

}  // namespace

TEST_CASE("S3 document parses", "[io]") {
  const ParsedModel pm = load("s3");
  CHECK(pm.model.num_states() == 6);
  CHECK(pm.model.transitions().size() == 7);
  REQUIRE(pm.faults.faulty.size() == 1);
  CHECK(pm.model.event_name(pm.faults.faulty[0]) == "f");
  CHECK(pm.secrets.secret.empty());
}

TEST_CASE("syntax errors carry line and column", "[io]") {
  const std::string text = "{\n  \"format_version\": \"1\",\n  \"states\": [,]\n}";
  try {
    parse_model(text);
    FAIL("no error");
  } catch (const InputError& e) {
    CHECK(e.where() == "line 3, column 14");
  }
}

TEST_CASE("semantic errors carry a JSON pointer", "[io]") {
  const std::string head = R"({"format_version": "1", "states": [{"id": "q0", "initial": true}],
    "events": [{"id": "a", "label": "a"}], "transitions": )";
  auto where = [&](const std::string& text) {
    try {
      parse_model(text);
    } catch (const InputError& e) {
      return e.where();
    }
    return std::string("no error");
  };
  CHECK(where(head + R"([{"from": "q0", "event": "a", "to": "q7"}]})") == "/transitions/0/to");
  CHECK(where(head + R"([{"from": "q0", "event": "b", "to": "q0"}]})") == "/transitions/0/event");
  CHECK(where(head + R"([{"from": "q0", "event": "a", "to": "q0", "weight": 2}]})") == "/transitions/0/weight");
  CHECK(where(head + R"(7})") == "/transitions");
  CHECK(where(R"({"format_version": "2", "states": [], "events": [], "transitions": []})") == "/format_version");
  CHECK(where(R"({"format_version": "1", "events": [], "transitions": []})") == "/");
}

TEST_CASE("lenient mode ignores unknown fields", "[io]") {
  const std::string text = R"({"format_version": "1", "comment": "x", "states": [{"id": "q0", "initial": true}],
    "events": [], "transitions": []})";
  CHECK_THROWS_AS(parse_model(text), InputError);
  CHECK(parse_model(text, false).model.num_states() == 1);
}

TEST_CASE("serialization is canonical and round-trips", "[io]") {
  for (const char* name : {"s1", "s2", "s3", "s4", "s5", "s6", "s7"}) {
    const ParsedModel pm = load(name);
    const std::string once = serialize_model(pm.model, pm.faults, pm.secrets);
    const ParsedModel again = parse_model(once);
    CHECK(serialize_model(again.model, again.faults, again.secrets) == once);
    CHECK(edges(again.model) == edges(pm.model));
    CHECK(again.secrets.secret == pm.secrets.secret);
    CHECK(again.faults.faulty == pm.faults.faulty);
  }
}

TEST_CASE("declared outputs may include unused symbols", "[io]") {
  const std::string text = R"({"format_version": "1", "outputs": ["z", "a"], "states": [{"id": "q0", "initial": true}],
    "events": [{"id": "e", "label": "a"}], "transitions": [{"from": "q0", "event": "e", "to": "q0"}]})";
  const ParsedModel pm = parse_model(text);
  CHECK(pm.model.output_names() == std::vector<std::string>{"z", "a"});
  CHECK(parse_model(serialize_model(pm.model)).model.output_names() == pm.model.output_names());
}

TEST_CASE("verdict documents have a witness iff the property fails", "[io]") {
  const auto [m, f, s] = load("s3");
  for (Property p : {Property::kDiagnosability, Property::kStarStrongDetectability, Property::kCurrentStateOpacity}) {
    const PropertyInstance inst{p, f, s, {}};
    const Json doc = detail::verdict_document(m, inst, check_property(m, inst));
    CHECK(doc["witness"].is_null() == doc["holds"].get<bool>());
    CHECK(doc["statistics"].contains("product_states"));
  }
  const PropertyInstance diag{Property::kDiagnosability, f, s, {}};
  const Json doc = detail::verdict_document(m, diag, check_property(m, diag));
  CHECK(doc["parameters"]["faults"] == Json::array({"f"}));
  CHECK(doc["witness"]["fault_step"]["event"] == "(f,ε)");
  CHECK(doc["witness"]["projection"]["left"].back() == "u");
}

TEST_CASE("DOT output is well formed", "[dot]") {
  const auto [s2, f, s] = load("s2");
  const ObserverAutomaton obs = build_observer(s2);
  const std::string text = to_dot(obs, "observer");
  CHECK(dot_error(text).empty());
  for (const char* node : {"\"{q0}\"", "\"{q1,q2}\"", "\"{q1}\"", "\"∅\""}) {
    CHECK(text.find(node) != std::string::npos);
  }

  const std::string model = to_dot(s2, "s2");
  CHECK(dot_error(model).empty());
  CHECK(model.find("label=\"e2(ε)\"") != std::string::npos);
  CHECK(model.find("label=\"e1(a)\"") != std::string::npos);
  CHECK(model.find("\"__init0\" -> \"q0\"") != std::string::npos);

  const auto s3 = load("s3");
  const ProductAutomaton cc = concurrent_composition(faulty_subautomaton(s3.model, s3.faults).automaton,
                                                     normal_subautomaton(s3.model, s3.faults).automaton);
  const std::string product = to_dot(cc.automaton, "cc");
  CHECK(dot_error(product).empty());
  CHECK(product.find("\"(q3,q4)\" -> \"(q5,q4)\" [label=\"(f,ε)(ε)\"]") != std::string::npos);

  const auto s7 = load("s7");
  CHECK(dot_error(to_dot(build_generalized_twin_plant(s7.model, s7.faults.faulty[0]).automaton, "gtp")).empty());
}

TEST_CASE("DOT quoting escapes hostile names", "[dot]") {
  RawLfsa raw;
  raw.states = {"a \"quoted\" state", "back\\slash", "new\nline"};
  raw.outputs = {"x"};
  raw.events = {{"e", "x"}};
  raw.transitions = {{"a \"quoted\" state", "e", "back\\slash"}, {"back\\slash", "e", "new\nline"}};
  raw.initial = {"a \"quoted\" state"};
  const std::string text = to_dot(validate(raw), "g\"x");
  CHECK(dot_error(text).empty());
  DotRecognizer r(text);
  REQUIRE(r.check().empty());
  CHECK(r.edges() == 3);
}

TEST_CASE("empty automaton gives a DOT graph without nodes", "[dot]") {
  const std::string text = to_dot(Lfsa(LfsaParts{}), "empty");
  DotRecognizer r(text);
  REQUIRE(r.check().empty());
  CHECK(r.nodes() == 0);
  CHECK(r.edges() == 0);
}

TEST_CASE("the DOT recognizer rejects malformed input", "[dot]") {
  CHECK_FALSE(dot_error("digraph { a -> }").empty());
  CHECK_FALSE(dot_error("digraph { \"a -> b }").empty());
  CHECK_FALSE(dot_error("graph { a -> b }").empty());
  CHECK_FALSE(dot_error("digraph { a [label=x }").empty());
  CHECK(dot_error("strict digraph G { node [shape=box]; a -> b -> c; subgraph s { d } rankdir=LR }").empty());
}

TEST_CASE("cli exit codes", "[cli]") {
  CHECK(run({"verify", model_path("s3"), "--property", "diag"}).code == kExitFails);
  CHECK(run({"verify", model_path("s5"), "--property", "infso"}).code == kExitHolds);
  CHECK(run({"verify", model_path("missing"), "--property", "cso"}).code == kExitUsage);
  CHECK(run({"verify", model_path("s2"), "--property", "nope"}).code == kExitUsage);
  CHECK(run({"verify", model_path("s2"), "--property", "kso"}).code == kExitUsage);
  CHECK(run({"verify", model_path("s2"), "--property", "cso", "--frobnicate"}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitHolds);
  CHECK(run({"verify", model_path("s2"), "--property", "cso", "--secret", "q9"}).code == kExitUsage);
}

TEST_CASE("cli diagnosability witness names the fault and the cycle", "[cli]") {
  const Run r = run({"verify", model_path("s3"), "--property", "diag", "--json"});
  REQUIRE(r.code == kExitFails);
  const Json doc = Json::parse(r.out);
  CHECK(doc["holds"] == false);
  CHECK(doc["witness"]["fault_step"]["event"] == "(f,ε)");
  CHECK(doc["witness"]["cycle"][0]["event"] == "(u,ε)");

  const Run text = run({"verify", model_path("s3"), "--property", "diag"});
  CHECK(text.out.find("(f,ε)") != std::string::npos);
  CHECK(text.out.find("(u,ε)") != std::string::npos);
}

TEST_CASE("cli secret and fault overrides", "[cli]") {
  CHECK(run({"verify", model_path("s2"), "-p", "cso", "--secret", "q2"}).code == kExitHolds);
  CHECK(run({"verify", model_path("s2"), "-p", "iso", "--secret", "q0"}).code == kExitFails);
  CHECK(run({"verify", model_path("s2"), "-p", "infso", "--secret", "q1"}).code == kExitFails);
  CHECK(run({"verify", model_path("s3"), "-p", "diag", "--fault", "u"}).code == kExitFails);
}

TEST_CASE("cli all-properties reports every check", "[cli]") {
  const Run r = run({"verify", model_path("s2"), "--all-properties", "--k", "2", "--json"});
  CHECK(r.code == kExitFails);
  const Json docs = Json::parse(r.out);
  CHECK(docs.size() == 12);
  const Run without_k = run({"verify", model_path("s2"), "--all-properties", "--json"});
  CHECK(Json::parse(without_k.out).size() == 10);
}

TEST_CASE("cli timing is opt-in", "[cli]") {
  const Run plain = run({"verify", model_path("s5"), "-p", "sinfso", "--json"});
  CHECK_FALSE(Json::parse(plain.out).contains("timing"));
  const Run timed = run({"verify", model_path("s5"), "-p", "sinfso", "--json", "--timing"});
  CHECK(Json::parse(timed.out)["timing"].contains("milliseconds"));
}

TEST_CASE("cli builds every artifact", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path() / "desv_cli_artifacts";
  std::filesystem::create_directories(dir);
  for (const char* artifact : {"observer", "self-composition", "cc-fn", "cc-nn", "epsilon", "dss-observer",
                               "twin-plant", "yl-verifier", "gtp", "s-phi", "cc-obs", "cc-dss-obs"}) {
    for (const char* format : {"dot", "json"}) {
      const std::string path = (dir / (std::string(artifact) + "." + format)).string();
      const Run r = run({"build", model_path("s7"), "--artifact", artifact, "--format", format, "-o", path});
      INFO(artifact << " " << format << " " << r.err);
      REQUIRE(r.code == kExitHolds);
      const std::string text = slurp(path);
      if (std::string(format) == "dot") {
        CHECK(dot_error(text).empty());
      } else if (std::string(artifact) == "epsilon") {
        // Export only: the plant carries the reserved event.
        CHECK(Json::parse(text)["events"].back()["id"] == std::string(kEpsilonEvent));
        CHECK_THROWS_AS(parse_model(text), InputError);
      } else {
        CHECK_NOTHROW(parse_model(text));
      }
    }
  }
  CHECK(run({"build", model_path("s2"), "--artifact", "gtp"}).code == kExitUsage);
  CHECK(run({"build", model_path("s2"), "--artifact", "bogus"}).code == kExitUsage);
}

TEST_CASE("cli oracle and generator", "[cli]") {
  CHECK(run({"oracle", model_path("s2"), "-p", "star-sd", "--bound", "20"}).code == kExitFails);
  CHECK(run({"oracle", model_path("s1"), "-p", "star-sd", "--bound", "10"}).code == kExitHolds);
  CHECK(run({"oracle", model_path("s5"), "-p", "infso", "--bound", "6"}).code == kExitHolds);
  CHECK(run({"oracle", model_path("s5"), "-p", "sinfso", "--bound", "6", "--json"}).code == kExitFails);
  CHECK(run({"oracle", model_path("s5"), "-p", "infso", "--bound", "0"}).code == kExitUsage);

  const Run a = run({"gen", "--states", "5", "--events", "3", "--seed", "42", "--live"});
  const Run b = run({"gen", "--states", "5", "--events", "3", "--seed", "42", "--live"});
  REQUIRE(a.code == kExitHolds);
  CHECK(a.out == b.out);
  CHECK(parse_model(a.out).model.num_states() == 5);
  CHECK(run({"gen", "--states", "5", "--events", "3"}).code == kExitUsage);
}

TEST_CASE("cli JSON output is byte-identical across runs", "[cli]") {
  for (const char* p : {"star-sd", "omega-sd", "diag", "pred", "cso", "iso", "infso", "scso", "siso", "sinfso"}) {
    const Run a = run({"verify", model_path("s3"), "-p", p, "--json"});
    const Run b = run({"verify", model_path("s3"), "-p", p, "--json"});
    CHECK(a.out == b.out);
  }
}
