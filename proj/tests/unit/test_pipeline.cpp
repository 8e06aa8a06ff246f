#include <doctest.h>

#include <algorithm>

#include "fixture.hpp"
#include "weft/errors.hpp"
#include "weft/pipeline.hpp"

using namespace weft;
using namespace weft::testing;
namespace fs = std::filesystem;

namespace {

std::string config_error_field(const std::string& json, const fs::path& base = fixture_dir()) {
  try {
    auto cfg = parse_run_config(json, base);
    resolve_services(cfg, {});
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

RunOptions quiet_to(const fs::path& out) {
  RunOptions o;
  o.out_dir = out;
  o.jobs = 2;
  return o;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config errors name the field") {
  CHECK(config_error_field(R"({"services":[{"name":"x","root_dir":"does-not-exist"}]})") == "services[0].root_dir");
  CHECK(config_error_field(R"({"services":[{"name":"x"}]})") == "services[0].root_dir");
  CHECK(config_error_field(R"({"services":"everything"})") == "services");
  CHECK(config_error_field(R"({"services":[],"thresholds":{"call":"high"}})") == "thresholds.call");
  CHECK(config_error_field(R"({"services":[],"checks":{"Z01":{}}})") == "checks.Z01");
  CHECK(config_error_field(R"({"services":[],"checks":{"E01":{"severity":"fatal"}}})") == "checks.E01.severity");
  CHECK(config_error_field(R"({"services":[],"colour":"blue"})") == "colour");
  CHECK(config_error_field(R"({"services":[]})") == "services");
  CHECK(config_error_field("{") == "config");
}

TEST_CASE("nonexistent root dir makes run return 3") {
  TempDir dir;
  spit(dir.path() / "weft.json", R"({"services":[{"name":"x","root_dir":"nowhere"}]})");
  std::string error;
  CHECK(run(dir.path() / "weft.json", quiet_to(dir.path() / "out"), &error) == kExitToolFailure);
  CHECK(error.find("services[0].root_dir") != std::string::npos);
}

TEST_CASE("auto discovery picks source directories") {
  auto cfg = parse_run_config(R"({"services":"auto","services_root":"."})", fixture_dir());
  auto trees = resolve_services(cfg, {});
  REQUIRE(trees.size() == 3);
  CHECK(trees[0].service_name == "orders");
  CHECK(trees[2].service_name == "users");
  CHECK_THROWS_AS(resolve_services(cfg, {"billing"}), ConfigError);
  CHECK(resolve_services(cfg, {"users"}).size() == 1);
}

TEST_CASE("configured rules append to the defaults") {
  auto cfg = parse_run_config(R"({"services":[],"rules":{"Service":{"annotations":["Gateway"],"suffixes":["Client"]}}})",
                              fixture_dir());
  auto rules = effective_ruleset(cfg, Convention::SpringLike);
  bool found = false;
  for (const auto& r : rules)
    if (r.role == ComponentRole::Service)
      found = std::find(r.annotation_names.begin(), r.annotation_names.end(), "Gateway") != r.annotation_names.end() &&
              std::find(r.name_suffixes.begin(), r.name_suffixes.end(), "Client") != r.name_suffixes.end();
  CHECK(found);
}

TEST_CASE("fixture run: status 2 and the golden output set") {
  TempDir dir;
  auto result = run_pipeline(load_run_config(fixture_dir() / "weft.json"), quiet_to(dir.path()));
  CHECK(result.exit_status == 2);
  CHECK(read_outputs(dir.path()) == read_outputs(fixture_dir() / "golden"));
}

TEST_CASE("removing the broken call leaves warnings only") {
  TempDir dir;
  copy_fixture(fixture_dir(), dir.path() / "shop");
  fs::remove(dir.path() / "shop/orders/src/main/java/com/shop/orders/client/ProfileGateway.java");
  std::string error;
  CHECK(run(dir.path() / "shop/weft.json", quiet_to(dir.path() / "out"), &error) == 1);
  CHECK(error.empty());
}

TEST_CASE("format and service selection") {
  TempDir dir;
  auto opts = quiet_to(dir.path());
  opts.formats = {"text"};
  opts.services = {"users", "shipping"};
  auto result = run_pipeline(load_run_config(fixture_dir() / "weft.json"), opts);
  auto files = read_outputs(dir.path());
  CHECK(files.count("report.txt") == 1);
  CHECK(files.count("system.json") == 0);
  CHECK(files.count("graph-services.dot") == 0);
  CHECK(files.count("orders.ir.json") == 0);
  CHECK(result.system.services.size() == 2);

  opts.formats = {"pdf"};
  CHECK_THROWS_AS(run_pipeline(load_run_config(fixture_dir() / "weft.json"), opts), ConfigError);
}

TEST_CASE("progress goes to the log callback") {
  TempDir dir;
  auto opts = quiet_to(dir.path());
  std::vector<std::string> lines;
  opts.log = [&](std::string_view l) { lines.emplace_back(l); };
  run_pipeline(load_run_config(fixture_dir() / "weft.json"), opts);
  CHECK_FALSE(lines.empty());
}

}
