#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixture.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "weft/errors.hpp"
#include "weft/weave.hpp"

using namespace weft;
using namespace weft::testing;

namespace {

std::vector<ServiceIr> golden_irs() {
  std::vector<ServiceIr> out;
  for (const char* name : {"orders", "shipping", "users"})
    out.push_back(load_service_ir(slurp(fixture_dir() / "golden" / (std::string(name) + ".ir.json"))));
  return out;
}

ServiceIr service_with_endpoint(const std::string& name, HttpMethod method, std::vector<std::string> templates) {
  ServiceIr ir;
  ir.service_name = name;
  Component c;
  c.role = ComponentRole::Controller;
  c.name = "Api";
  c.service = name;
  ir.components.push_back(c);
  Endpoint e;
  e.owner = "Api";
  e.http_method = method;
  e.url_templates = std::move(templates);
  e.handler.name = "handle";
  ir.endpoints.push_back(e);
  return ir;
}

void add_call(ServiceIr& ir, HttpMethod method, const std::string& url) {
  if (ir.components.empty()) {
    Component c;
    c.role = ComponentRole::Service;
    c.name = "Client";
    c.service = ir.service_name;
    ir.components.push_back(c);
  }
  RemoteCall rc;
  rc.caller_service = ir.service_name;
  rc.caller_component = ir.components[0].name;
  rc.caller_method = "call" + std::to_string(ir.remote_calls.size());
  rc.http_method = method;
  rc.url_template = url;
  ir.remote_calls.push_back(rc);
}

}  // namespace

TEST_SUITE("weave") {

TEST_CASE("normalize_entity_name") {
  CHECK(normalize_entity_name("OrderItemDTO") == std::vector<std::string>{"order", "item"});
  CHECK(normalize_entity_name("user") == std::vector<std::string>{"user"});
  CHECK(normalize_entity_name("DTO") == std::vector<std::string>{"dto"});
  CHECK(normalize_entity_name("HTTPRequestVO") == std::vector<std::string>{"http", "request"});
  CHECK(normalize_entity_name("order_line-item2") == std::vector<std::string>{"order", "line", "item", "2"});
  CHECK(normalize_entity_name("OrderEntityDto") == std::vector<std::string>{"order"});
}

TEST_CASE("wu_palmer hand examples") {
  auto t = Taxonomy::parse("root\n  thing\n    vehicle\n      car\n      truck\n");
  CHECK(wu_palmer("car", "truck", t) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(wu_palmer("car", "car", t) == 1.0);
  CHECK(wu_palmer("root", "car", t) == doctest::Approx(2.0 / 5.0));
  CHECK(wu_palmer("CAR", "Truck", t) == doctest::Approx(0.75));
  CHECK_THROWS_AS(wu_palmer("car", "boat", t), TermNotFound);
}

TEST_CASE("wu_palmer equals the ancestor-pair oracle on random taxonomies") {
  Rng rng(3);
  for (int inst = 0; inst < 40; ++inst) {
    auto rt = random_taxonomy(rng, 30);
    auto t = Taxonomy::parse(rt.text);
    REQUIRE(t.size() == rt.terms.size());
    for (std::size_t a = 0; a < rt.terms.size(); ++a)
      for (std::size_t b = 0; b < rt.terms.size(); ++b)
        CHECK(std::fabs(wu_palmer(rt.terms[a], rt.terms[b], t) - oracle_wu_palmer(rt, a, b)) <= 1e-12);
  }
}

TEST_CASE("taxonomy construction and errors") {
  Taxonomy t("Entity");
  t.add("Party", "entity");
  t.add("person", "party");
  CHECK(t.depth("person") == 3);
  CHECK(t.parent("person") == "party");
  CHECK(t.lcs("person", "party") == "party");
  CHECK_THROWS_AS(t.add("x", "nowhere"), TermNotFound);
  CHECK_THROWS_AS(t.add("person", "entity"), std::invalid_argument);
  CHECK_THROWS_AS(Taxonomy::parse("a\n b\n"), MalformedDocument);
  CHECK_THROWS_AS(Taxonomy::parse("a\n\tb\n"), MalformedDocument);
  CHECK_THROWS_AS(Taxonomy::parse("a\nb\n"), MalformedDocument);
  CHECK_THROWS_AS(Taxonomy::parse("a\n    b\n"), MalformedDocument);
  CHECK_THROWS_AS(Taxonomy::parse("a\n  b\n  B\n"), MalformedDocument);
  CHECK_THROWS_AS(Taxonomy::parse(""), MalformedDocument);
}

TEST_CASE("entity_similarity examples") {
  auto exact = entity_similarity("Order", "OrderDTO", nullptr);
  CHECK(exact.score == 1.0);
  CHECK(exact.strategy == SimilarityStrategy::Exact);

  auto disjoint = entity_similarity("Order", "Payment", nullptr);
  CHECK(disjoint.score == 0.0);
  CHECK(disjoint.strategy == SimilarityStrategy::Token);

  auto t = Taxonomy::parse("entity\n  person\n    client\n    customer\n");
  auto tax = entity_similarity("Client", "Customer", &t);
  CHECK(tax.score == doctest::Approx(2.0 * 2.0 / (3.0 + 3.0)));
  CHECK(tax.strategy == SimilarityStrategy::Taxonomy);

  auto jaccard = entity_similarity("OrderItem", "Order", nullptr);
  CHECK(jaccard.score == doctest::Approx(0.5));
  CHECK(jaccard.strategy == SimilarityStrategy::Token);
}

TEST_CASE("types_compatible") {
  CHECK(types_compatible("int", "Integer"));
  CHECK(types_compatible("List<Long>", "Set<long>"));
  CHECK(types_compatible("java.lang.String", "String"));
  CHECK_FALSE(types_compatible("String", "Long"));
}

TEST_CASE("context map") {
  auto irs = golden_irs();
  CHECK(build_context_map({derive_data_model(irs[0])}, nullptr).matches.empty());

  std::vector<DataModel> models;
  for (const auto& ir : irs) models.push_back(derive_data_model(ir));
  auto tax = Taxonomy::parse(slurp(fixture_dir() / "taxonomy.txt"));
  auto map = build_context_map(models, &tax);
  REQUIRE(map.matches.size() == 1);
  const auto& m = map.matches[0];
  CHECK(m.entity_a == EntityRef{"orders", "User"});
  CHECK(m.entity_b == EntityRef{"users", "User"});
  CHECK(m.score == 1.0);
  std::vector<std::string> fields;
  for (const auto& f : m.field_matches) {
    fields.push_back(f.field_a);
    CHECK(f.field_a == f.field_b);
    CHECK(f.type_compatible);
  }
  CHECK(fields == std::vector<std::string>{"id", "name", "email"});

  std::reverse(models.begin(), models.end());
  CHECK(build_context_map(models, &tax) == map);
}

TEST_CASE("url parsing and path scores") {
  auto u = parse_call_url("http://Users:8080/api/users/{*}?x=1");
  CHECK(u.host == "users");
  CHECK(u.segments == std::vector<std::string>{"api", "users", "{*}"});
  auto base = parse_call_url("{*}/api/x");
  CHECK_FALSE(base.host.has_value());
  CHECK(base.segments == std::vector<std::string>{"api", "x"});
  CHECK(parse_call_url("{*}").segments == std::vector<std::string>{"{*}"});
  CHECK(parse_call_url("/").segments.empty());

  auto seg = [](std::string_view p) { return path_segments(p); };
  CHECK(path_score(seg("/api/users/{*}"), seg("/api/users/{id}")) == doctest::Approx(2.5 / 3));
  CHECK(path_score(seg("/api/users"), seg("/api/users/{id}")) == doctest::Approx(2.0 / 3));
  CHECK(path_score(seg("/api/users/x"), seg("/api/users")) == 0.0);
  CHECK(path_score(seg("/api/orders/1"), seg("/api/users/1")) == 0.0);
  CHECK(path_score(seg("/"), seg("/")) == 1.0);
  CHECK(is_template_segment("{id}"));
  CHECK_FALSE(is_template_segment("v{id}"));
  CHECK(method_factor(HttpMethod::GET, HttpMethod::GET) == 1.0);
  CHECK(method_factor(HttpMethod::UNKNOWN, HttpMethod::POST) == 0.9);
  CHECK(method_factor(HttpMethod::GET, HttpMethod::ANY) == 0.9);
  CHECK(method_factor(HttpMethod::POST, HttpMethod::GET) == 0.0);
}

TEST_CASE("call matching hand examples") {
  std::vector<ServiceIr> svcs{service_with_endpoint("users", HttpMethod::GET, {"/api/users/{id}"}),
                              ServiceIr{}};
  svcs[1].service_name = "orders";
  add_call(svcs[1], HttpMethod::GET, "http://users/api/users/{*}");
  add_call(svcs[1], HttpMethod::POST, "http://users/api/users/{id}");
  TopologyModel topo;
  auto inv = build_inventory(topo, svcs);

  auto edges = match_call_to_endpoints(svcs[1], 0, svcs, inv);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].score == doctest::Approx(2.5 / 3));
  CHECK(edges[0].confidence == 1.0);
  CHECK_FALSE(edges[0].ambiguous);
  CHECK(edges[0].to_service == "users");

  CHECK(match_call_to_endpoints(svcs[1], 1, svcs, inv).empty());
}

TEST_CASE("an endpoint with two templates matches a call to each") {
  std::vector<ServiceIr> svcs{service_with_endpoint("srv", HttpMethod::GET, {"/a/x", "/b/x"}), ServiceIr{}};
  svcs[1].service_name = "cli";
  add_call(svcs[1], HttpMethod::GET, "http://srv/a/x");
  add_call(svcs[1], HttpMethod::GET, "http://srv/b/x");
  auto inv = build_inventory(TopologyModel{}, svcs);
  auto first = match_call_to_endpoints(svcs[1], 0, svcs, inv);
  auto second = match_call_to_endpoints(svcs[1], 1, svcs, inv);
  REQUIRE(first.size() == 1);
  REQUIRE(second.size() == 1);
  CHECK(first[0].matched_url_template == "/a/x");
  CHECK(second[0].matched_url_template == "/b/x");
  CHECK(first[0].score == 1.0);
  CHECK(second[0].score == 1.0);
}

TEST_CASE("unresolved hosts halve confidence and ties split it") {
  std::vector<ServiceIr> svcs{service_with_endpoint("a", HttpMethod::GET, {"/v1/x/{id}"}),
                              service_with_endpoint("b", HttpMethod::GET, {"/v1/x/{name}"}), ServiceIr{}};
  svcs[2].service_name = "c";
  add_call(svcs[2], HttpMethod::GET, "/v1/x/{*}");
  add_call(svcs[2], HttpMethod::GET, "http://a/v1/x/{*}");
  auto inv = build_inventory(TopologyModel{}, svcs);
  auto tied = match_call_to_endpoints(svcs[2], 0, svcs, inv);
  REQUIRE(tied.size() == 2);
  for (const auto& e : tied) {
    CHECK(e.ambiguous);
    CHECK(e.confidence == doctest::Approx(0.25));
  }
  auto direct = match_call_to_endpoints(svcs[2], 1, svcs, inv);
  REQUIRE(direct.size() == 1);
  CHECK(direct[0].confidence == 1.0);
}

TEST_CASE("call matching equals the brute-force oracle") {
  Rng rng(17);
  for (int inst = 0; inst < 60; ++inst) {
    auto mi = random_match_instance(rng);
    auto inv = build_inventory(mi.topology, mi.services);
    for (std::size_t c = 0; c < mi.calls.size(); ++c) {
      auto got = match_call_to_endpoints(mi.services[mi.caller], c, mi.services, inv);
      auto want = oracle_match(mi, c);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].endpoint.service == want[i].service);
        CHECK(got[i].endpoint.index == want[i].index);
        CHECK(got[i].matched_url_template == want[i].tmpl);
        CHECK(std::fabs(got[i].score - want[i].score) <= 1e-12);
        CHECK(std::fabs(got[i].confidence - want[i].confidence) <= 1e-12);
      }
    }
  }
}

TEST_CASE("event matching") {
  auto make = [](const std::string& name, EventDirection dir, const std::string& topic) {
    ServiceIr ir;
    ir.service_name = name;
    Component c;
    c.role = ComponentRole::Service;
    c.name = "S";
    c.service = name;
    ir.components.push_back(c);
    ir.event_ops.push_back({dir, topic, "S", std::nullopt});
    return ir;
  };
  std::vector<ServiceIr> pair{make("orders", EventDirection::Publish, "order.created"),
                              make("shipping", EventDirection::Subscribe, "order.created")};
  auto m = match_events(pair);
  REQUIRE(m.edges.size() == 1);
  CHECK(m.edges[0] == EventEdge{"orders", "shipping", "order.created"});

  std::vector<ServiceIr> lonely{make("orders", EventDirection::Publish, "nobody.listens")};
  auto l = match_events(lonely);
  CHECK(l.edges.empty());
  REQUIRE(l.diagnostics.size() == 1);
  CHECK(l.diagnostics[0].severity == "info");

  std::vector<ServiceIr> wild{make("orders", EventDirection::Publish, "{*}"),
                              make("shipping", EventDirection::Subscribe, "{*}")};
  auto w = match_events(wild);
  CHECK(w.edges.empty());
  REQUIRE_FALSE(w.diagnostics.empty());
  CHECK(w.diagnostics[0].severity == "warning");
}

TEST_CASE("weave: single service and permutation invariance") {
  ServiceIr solo;
  solo.service_name = "solo";
  auto one = weave({solo}, nullptr, nullptr);
  CHECK(one.comm_edges.empty());
  CHECK(one.event_edges.empty());
  CHECK(one.topology_edges.empty());
  CHECK(one.context_map.matches.empty());

  auto irs = golden_irs();
  auto tax = Taxonomy::parse(slurp(fixture_dir() / "taxonomy.txt"));
  auto topo = parse_compose(slurp(fixture_dir() / "docker-compose.yml"));
  auto base = weave(irs, &tax, &topo);
  CHECK(base.comm_edges.size() == 7);
  CHECK(base.event_edges.size() == 1);
  std::vector<std::size_t> order{0, 1, 2};
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<ServiceIr> perm;
    for (auto i : order) perm.push_back(irs[i]);
    CHECK(weave(perm, &tax, &topo, {}, 3) == base);
  }
  CHECK_THROWS_AS(weave({solo, solo}, nullptr, nullptr), DuplicateService);
}

}
