#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "weft/weft.h"

namespace fs = std::filesystem;

namespace {

const fs::path kShop = fs::path(WEFT_FIXTURE_DIR) / "shop";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Scratch {
  fs::path path;
  Scratch() {
    auto pattern = (fs::temp_directory_path() / "weft-capi-XXXXXX").string();
    REQUIRE(::mkdtemp(pattern.data()) != nullptr);
    path = pattern;
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  weft_string_free(s);
  return out;
}

int shell(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version") { CHECK(std::string(weft_version()).find('.') != std::string::npos); }

TEST_CASE("laast handles") {
  const std::string doc = R"({"kind":"CompilationUnit","children":[{"kind":"TypeDecl","name":"A"}]})";
  weft_laast* tree = nullptr;
  REQUIRE(weft_laast_load(doc.data(), doc.size(), &tree) == WEFT_OK);
  CHECK(weft_laast_node_count(tree) == 2);
  char* out = nullptr;
  REQUIRE(weft_laast_save(tree, &out) == WEFT_OK);
  CHECK(take(out) == doc);
  weft_laast_free(tree);

  const std::string bad = R"({"kind":"Statement"})";
  CHECK(weft_laast_load(bad.data(), bad.size(), &tree) == WEFT_ERR_SCHEMA);
  CHECK(std::string(weft_last_error()).find("$.kind") != std::string::npos);
  CHECK(weft_laast_load("{", 1, &tree) == WEFT_ERR_MALFORMED);
  CHECK(weft_laast_load(nullptr, 0, &tree) == WEFT_ERR_INVALID_ARGUMENT);
  CHECK(weft_laast_node_count(nullptr) == 0);
  weft_laast_free(nullptr);
}

TEST_CASE("extract and build an IR") {
  weft_laast* tree = nullptr;
  REQUIRE(weft_extract("orders", (kShop / "orders").c_str(), "SpringLike", 2, &tree) == WEFT_OK);
  CHECK(weft_laast_node_count(tree) == 108);

  weft_service_ir* ir = nullptr;
  REQUIRE(weft_service_ir_build(tree, "orders", "SpringLike", &ir) == WEFT_OK);
  CHECK(weft_service_ir_count(ir, WEFT_IR_COMPONENTS) == 7);
  CHECK(weft_service_ir_count(ir, WEFT_IR_ENDPOINTS) == 3);
  CHECK(weft_service_ir_count(ir, WEFT_IR_REMOTE_CALLS) == 6);
  CHECK(weft_service_ir_count(ir, WEFT_IR_EVENT_OPS) == 1);

  char* text = nullptr;
  REQUIRE(weft_service_ir_save(ir, &text) == WEFT_OK);
  const auto saved = take(text);
  weft_service_ir* back = nullptr;
  REQUIRE(weft_service_ir_load(saved.data(), saved.size(), &back) == WEFT_OK);
  REQUIRE(weft_service_ir_save(back, &text) == WEFT_OK);
  CHECK(take(text) == saved);
  weft_service_ir_free(back);
  weft_service_ir_free(ir);
  weft_laast_free(tree);

  CHECK(weft_extract("x", "/no/such/dir", nullptr, 1, &tree) == WEFT_ERR_IO);
  CHECK(weft_extract("x", kShop.c_str(), "Cobol", 1, &tree) == WEFT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("similarity") {
  const std::string text = "root\n  thing\n    vehicle\n      car\n      truck\n";
  weft_taxonomy* tax = nullptr;
  REQUIRE(weft_taxonomy_parse(text.data(), text.size(), &tax) == WEFT_OK);
  double score = 0;
  REQUIRE(weft_wu_palmer(tax, "car", "truck", &score) == WEFT_OK);
  CHECK(score == doctest::Approx(0.75));
  CHECK(weft_wu_palmer(tax, "car", "boat", &score) == WEFT_ERR_TERM_NOT_FOUND);
  weft_taxonomy_free(tax);

  const char* strategy = nullptr;
  REQUIRE(weft_entity_similarity("Order", "OrderDTO", nullptr, &score, &strategy) == WEFT_OK);
  CHECK(score == 1.0);
  CHECK(std::string(strategy) == "exact");
  REQUIRE(weft_entity_similarity("Order", "Payment", nullptr, &score, &strategy) == WEFT_OK);
  CHECK(std::string(strategy) == "token");

  CHECK(weft_taxonomy_parse("a\n b\n", 5, &tax) == WEFT_ERR_MALFORMED);
}

TEST_CASE("full run through handles") {
  Scratch out;
  const auto config = (kShop / "weft.json").string();
  const auto dir = out.path.string();
  weft_run_options opts{};
  opts.config_path = config.c_str();
  opts.out_dir = dir.c_str();
  opts.jobs = 2;
  weft_run* run = nullptr;
  REQUIRE(weft_run_execute(&opts, &run) == WEFT_OK);
  CHECK(weft_run_exit_status(run) == 2);
  CHECK(weft_run_finding_count(run, "error") == 1);
  CHECK(weft_run_finding_count(run, "warning") == 1);
  CHECK(weft_run_finding_count(run, "info") == 6);
  CHECK(weft_run_finding_count(run, nullptr) == 8);

  char* text = nullptr;
  REQUIRE(weft_run_report(run, "text", &text) == WEFT_OK);
  CHECK(take(text) == slurp(kShop / "golden" / "report.txt"));
  REQUIRE(weft_run_report(run, "json", &text) == WEFT_OK);
  CHECK(take(text) == slurp(kShop / "golden" / "report.json"));
  REQUIRE(weft_run_dot(run, "services", &text) == WEFT_OK);
  CHECK(take(text) == slurp(kShop / "golden" / "graph-services.dot"));
  CHECK(weft_run_dot(run, "sideways", &text) == WEFT_ERR_INVALID_ARGUMENT);
  CHECK(weft_run_report(run, "xml", &text) == WEFT_ERR_INVALID_ARGUMENT);
  weft_run_free(run);

  CHECK(fs::exists(out.path / "system.json"));
}

TEST_CASE("one-shot analyze maps failures to 3") {
  weft_run_options opts{};
  opts.config_path = "/no/such/weft.json";
  CHECK(weft_analyze(&opts) == 3);
  CHECK(std::string(weft_last_error()).size() > 0);
  CHECK(weft_analyze(nullptr) == 3);

  Scratch out;
  const auto config = (kShop / "weft.json").string();
  const auto dir = out.path.string();
  opts.config_path = config.c_str();
  opts.out_dir = dir.c_str();
  opts.formats = "json";
  CHECK(weft_analyze(&opts) == 2);
  CHECK(fs::exists(out.path / "report.json"));
  CHECK_FALSE(fs::exists(out.path / "report.txt"));
}

}

TEST_SUITE("cli") {

TEST_CASE("version flag") { CHECK(shell(quoted(WEFT_CLI_PATH) + " --version > /dev/null") == 0); }

TEST_CASE("fixture run exits 2 and writes the golden set") {
  Scratch out;
  CHECK(shell(quoted(WEFT_CLI_PATH) + " analyze --config " + quoted(kShop / "weft.json") + " --out " +
              quoted(out.path) + " --jobs 2 -q") == 2);
  for (const auto& entry : fs::directory_iterator(kShop / "golden"))
    CHECK_MESSAGE(slurp(out.path / entry.path().filename()) == slurp(entry.path()), entry.path().filename().string());
}

TEST_CASE("usage and configuration errors exit 3") {
  Scratch out;
  CHECK(shell(quoted(WEFT_CLI_PATH) + " analyze 2> /dev/null") == 3);
  CHECK(shell(quoted(WEFT_CLI_PATH) + " 2> /dev/null > /dev/null") == 3);
  CHECK(shell(quoted(WEFT_CLI_PATH) + " analyze --config /no/such.json -q 2> /dev/null") == 3);
  std::ofstream(out.path / "bad.json") << R"({"services":[{"name":"x","root_dir":"missing"}]})";
  CHECK(shell(quoted(WEFT_CLI_PATH) + " analyze --config " + quoted(out.path / "bad.json") + " 2> " +
              quoted(out.path / "err.txt")) == 3);
  CHECK(slurp(out.path / "err.txt").find("services[0].root_dir") != std::string::npos);
}

TEST_CASE("subset of services and formats") {
  Scratch out;
  CHECK(shell(quoted(WEFT_CLI_PATH) + " analyze --config " + quoted(kShop / "weft.json") + " --out " +
              quoted(out.path) + " --services users --format text -q") == 0);
  CHECK(slurp(out.path / "report.txt").find("W03") != std::string::npos);
  CHECK_FALSE(fs::exists(out.path / "system.json"));
}

}
