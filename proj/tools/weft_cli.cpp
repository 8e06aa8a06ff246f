#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "weft/weft.h"

namespace {

void log_to_stderr(const char* message, void*) { std::fprintf(stderr, "[weft] %s\n", message); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weft: static architecture reconstruction for microservice systems"};
  app.set_version_flag("--version", std::string(weft_version()));
  app.require_subcommand(1);

  std::string config, out_dir, services, formats;
  unsigned jobs = 0;
  bool quiet = false;
  auto* analyze = app.add_subcommand("analyze", "extract, weave and check every configured service");
  analyze->add_option("--config", config, "run configuration (JSON)")->required();
  analyze->add_option("--out", out_dir, "output directory (overrides output_dir)");
  analyze->add_option("--jobs", jobs, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  analyze->add_option("--services", services, "comma separated subset of services");
  analyze->add_option("--format", formats, "comma separated output formats: dot,json,text");
  analyze->add_flag("-q,--quiet", quiet, "no progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  weft_run_options options{};
  options.config_path = config.c_str();
  options.out_dir = out_dir.empty() ? nullptr : out_dir.c_str();
  options.jobs = jobs;
  options.services = services.empty() ? nullptr : services.c_str();
  options.formats = formats.empty() ? nullptr : formats.c_str();
  options.log = quiet ? nullptr : log_to_stderr;

  const int status = weft_analyze(&options);
  if (status == 3 && quiet) std::fprintf(stderr, "weft: %s\n", weft_last_error());
  return status;
}
