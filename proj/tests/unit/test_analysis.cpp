#include <doctest.h>

#include <map>

#include "generators.hpp"
#include "oracles.hpp"
#include "weft/analysis.hpp"

using namespace weft;
using namespace weft::testing;

namespace {

// Small hand-built systems, one per rule.
class Mini {
 public:
  ServiceIr& svc(const std::string& name) {
    for (auto& s : irs_)
      if (s.service_name == name) return s;
    ServiceIr ir;
    ir.service_name = name;
    for (auto [role, comp] : {std::pair{ComponentRole::Controller, "Api"}, std::pair{ComponentRole::Service, "Client"}}) {
      Component c;
      c.role = role;
      c.name = comp;
      c.service = name;
      ir.components.push_back(c);
    }
    irs_.push_back(ir);
    return irs_.back();
  }

  void endpoint(const std::string& s, HttpMethod m, const std::string& tmpl, int path_params = 0) {
    Endpoint e;
    e.owner = "Api";
    e.http_method = m;
    e.url_templates = {tmpl};
    e.handler.name = "h" + std::to_string(svc(s).endpoints.size());
    for (int i = 0; i < path_params; ++i) e.params.push_back({"p" + std::to_string(i), ParamKind::Path, "Long"});
    svc(s).endpoints.push_back(e);
  }

  void call(const std::string& s, HttpMethod m, const std::string& url, int args = 1) {
    RemoteCall c;
    c.caller_service = s;
    c.caller_component = "Client";
    c.caller_method = "c" + std::to_string(svc(s).remote_calls.size());
    c.http_method = m;
    c.url_template = url;
    c.arg_count = args;
    svc(s).remote_calls.push_back(c);
  }

  void entity(const std::string& s, const std::string& name, std::vector<std::string> fields) {
    Component c;
    c.role = ComponentRole::Entity;
    c.name = name;
    c.service = s;
    for (auto& f : fields) c.fields.push_back({f, "String"});
    svc(s).components.push_back(c);
  }

  std::vector<Finding> findings(const TopologyModel* topo = nullptr, const AnalysisConfig& cfg = {}) {
    return run_checks(weave(irs_, nullptr, topo), cfg);
  }

  SystemIr system() { return weave(irs_, nullptr, nullptr); }

 private:
  std::vector<ServiceIr> irs_;
};

std::map<std::string, int> by_rule(const std::vector<Finding>& fs) {
  std::map<std::string, int> out;
  for (const auto& f : fs) ++out[f.rule_id];
  return out;
}

using Counts = std::map<std::string, int>;

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("empty system has no findings") {
  CHECK(run_checks(SystemIr{}).empty());
  CHECK(exit_status({}) == 0);
}

TEST_CASE("E01 dangling call") {
  Mini m;
  m.svc("b");
  m.call("a", HttpMethod::GET, "http://b/missing");
  auto fs = m.findings();
  CHECK(by_rule(fs) == Counts{{"E01", 1}});
  CHECK(fs[0].subjects.at(0).ref == "Client.c0");
  CHECK(fs[0].severity == Severity::Error);
  CHECK(exit_status(fs) == 2);
}

TEST_CASE("E02 method mismatch on a matching path") {
  Mini m;
  m.endpoint("b", HttpMethod::GET, "/api/items/{id}", 1);
  m.call("a", HttpMethod::POST, "http://b/api/items/{*}");
  m.call("a", HttpMethod::GET, "http://b/api/items/{*}");
  CHECK(by_rule(m.findings()) == Counts{{"E02", 1}});
}

TEST_CASE("E02 argument count mismatch") {
  Mini m;
  m.endpoint("b", HttpMethod::GET, "/api/items/{id}", 1);
  m.call("a", HttpMethod::GET, "http://b/api/items/{*}", 4);
  CHECK(by_rule(m.findings()) == Counts{{"E02", 1}});
  Mini ok;
  ok.endpoint("b", HttpMethod::GET, "/api/items/{id}", 1);
  ok.call("a", HttpMethod::GET, "http://b/api/items/{*}", 2);
  CHECK(ok.findings().empty());
}

TEST_CASE("W01 entity drift lists the unmatched field") {
  Mini m;
  m.entity("a", "User", {"id", "name", "email"});
  m.entity("b", "User", {"id", "name", "email", "phone"});
  auto fs = m.findings();
  CHECK(by_rule(fs) == Counts{{"W01", 1}});
  CHECK(fs[0].message.find("b.User.phone") != std::string::npos);
  CHECK(exit_status(fs) == 1);
}

TEST_CASE("W02 ambiguous edge") {
  Mini m;
  m.endpoint("b", HttpMethod::GET, "/api/media/{id}");
  m.endpoint("b", HttpMethod::GET, "/api/media/{key}");
  m.call("a", HttpMethod::GET, "http://b/api/media/{*}");
  auto fs = m.findings();
  CHECK(by_rule(fs) == Counts{{"W02", 1}});
  CHECK(fs[0].subjects.size() == 3);
}

TEST_CASE("W03 unreachable endpoint is informational") {
  Mini m;
  m.endpoint("b", HttpMethod::GET, "/api/x");
  auto fs = m.findings();
  CHECK(by_rule(fs) == Counts{{"W03", 1}});
  CHECK(fs[0].severity == Severity::Info);
  CHECK(exit_status(fs) == 0);
}

TEST_CASE("W04 declared dependency without communication") {
  Mini m;
  m.svc("a");
  m.svc("b");
  auto topo = parse_compose("services:\n  a:\n    depends_on: [b]\n  b:\n    image: x\n");
  CHECK(by_rule(m.findings(&topo)) == Counts{{"W04", 1}});

  Mini used;
  used.endpoint("b", HttpMethod::GET, "/x");
  used.call("a", HttpMethod::GET, "http://b/x");
  CHECK(used.findings(&topo).empty());
  auto undeclared = parse_compose("services:\n  a:\n    image: x\n  b:\n    image: x\n");
  CHECK(by_rule(used.findings(&undeclared)) == Counts{{"W04", 1}});
}

TEST_CASE("S01 cyclic dependency") {
  Mini m;
  m.endpoint("a", HttpMethod::GET, "/a");
  m.endpoint("b", HttpMethod::GET, "/b");
  m.call("a", HttpMethod::GET, "http://b/b");
  m.call("b", HttpMethod::GET, "http://a/a");
  auto fs = m.findings();
  CHECK(by_rule(fs) == Counts{{"S01", 1}});
  CHECK(fs[0].message == "cyclic dependency a -> b -> a");
}

TEST_CASE("overrides disable checks and change severities") {
  Mini m;
  m.svc("b");
  m.call("a", HttpMethod::GET, "http://b/missing");
  AnalysisConfig off;
  off.checks["E01"] = {false, std::nullopt};
  CHECK(m.findings(nullptr, off).empty());
  AnalysisConfig soft;
  soft.checks["E01"] = {true, Severity::Warning};
  auto fs = m.findings(nullptr, soft);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].severity == Severity::Warning);
  CHECK(exit_status(fs) == 1);
}

TEST_CASE("catalog") {
  const auto& cat = rule_catalog();
  REQUIRE(cat.size() == 7);
  CHECK(cat.front().id == "E01");
  CHECK(find_rule("S01")->name == "CyclicDependency");
  CHECK(find_rule("W03")->default_severity == Severity::Info);
  CHECK(find_rule("X99") == nullptr);
}

TEST_CASE("coupling on an isolated service and a chain") {
  Mini iso;
  iso.svc("solo");
  auto r = coupling_metrics(iso.system());
  REQUIRE(r.services.size() == 1);
  CHECK(r.services[0] == ServiceCoupling{"solo", 0, 0, 0.0});

  Mini chain;
  chain.endpoint("b", HttpMethod::GET, "/b");
  chain.endpoint("c", HttpMethod::GET, "/c");
  chain.call("a", HttpMethod::GET, "http://b/b");
  chain.call("b", HttpMethod::GET, "http://c/c");
  auto c = coupling_metrics(chain.system());
  REQUIRE(c.services.size() == 3);
  CHECK(c.services[0].instability == 1.0);
  CHECK(c.services[1].instability == 0.5);
  CHECK(c.services[2].instability == 0.0);
  CHECK(c.dependencies == 2);
  CHECK(c.mean_instability == 0.5);
}

TEST_CASE("cycles: DAG, two-cycle and exhaustive small graphs") {
  CHECK(detect_cycles({{"a", {"b"}}, {"b", {"c"}}, {"c", {}}}).empty());
  CHECK(detect_cycles({{"a", {"b"}}, {"b", {"a"}}}) == std::vector<std::vector<std::string>>{{"a", "b"}});
  CHECK(detect_cycles({{"a", {"a"}}}).empty());

  const std::vector<std::string> names{"n0", "n1", "n2"};
  for (unsigned mask = 0; mask < (1u << 9); ++mask) {
    ServiceGraph g;
    for (std::size_t i = 0; i < 3; ++i) {
      g[names[i]];
      for (std::size_t j = 0; j < 3; ++j)
        if (mask & (1u << (i * 3 + j))) g[names[i]].insert(names[j]);
    }
    CHECK(detect_cycles(g) == oracle_cycles(g));
  }
}

TEST_CASE("severity names") {
  CHECK(parse_severity("warning") == Severity::Warning);
  CHECK(to_string(Severity::Info) == "info");
  CHECK_FALSE(parse_severity("fatal").has_value());
}

}
