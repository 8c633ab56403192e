// stereotax: elicit, code, cluster and analyze stereotype associations.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration, 3 transport
// (including --offline cache misses), 4 input data or schema, 5 analysis.

#include <iostream>

#include <CLI11.hpp>

#include "stereotax/error.hpp"
#include "stereotax/report.hpp"
#include "stereotax/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"stereotax " + std::string(stereotax::kToolkitVersion) +
               ": stereotype-content auditing of language models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(stereotax::kToolkitVersion));

  std::string config_path = "stereotax.json";
  std::optional<std::uint64_t> seed;
  std::string cache_dir;
  std::string output_dir;
  bool offline = false;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "run configuration (JSON)")->capture_default_str();
  app.add_option("--seed", seed, "override both clustering and stats seeds");
  app.add_option("--cache-dir", cache_dir, "exchange cache directory");
  app.add_option("--output-dir", output_dir, "artifact directory");
  app.add_flag("--offline", offline, "forbid network access; cache misses fail");
  app.add_flag("-q,--quiet", quiet, "suppress progress lines");

  struct Sub {
    const char* name;
    const char* help;
    void (*run)(stereotax::report::Context&);
  };
  const Sub subs[] = {
      {"audit", "query the endpoint (cache first) and write the corpus", stereotax::report::cmd_audit},
      {"code", "code the corpus with the dictionaries", stereotax::report::cmd_code},
      {"cluster", "cluster unique responses and write prototype sheets", stereotax::report::cmd_cluster},
      {"analyze", "write taxonomy tables, tests, predictive models and trends", stereotax::report::cmd_analyze},
      {"report-all", "audit, code, cluster and analyze in sequence", stereotax::report::cmd_report_all},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : stereotax::report::kExitConfig;
  }

  try {
    stereotax::report::Context ctx;
    ctx.config = stereotax::report::RunConfig::load(config_path);
    if (seed) ctx.config.seeds = {*seed, *seed};
    if (!cache_dir.empty()) ctx.config.cache_dir = cache_dir;
    if (!output_dir.empty()) ctx.config.output_dir = output_dir;
    if (offline) ctx.config.offline = true;
    if (!quiet) ctx.log = &std::cerr;
    for (const auto& s : subs) {
      if (app.got_subcommand(s.name)) s.run(ctx);
    }
    return stereotax::report::kExitOk;
  } catch (const stereotax::Error& e) {
    std::cerr << "stereotax: " << stereotax::to_string(e.kind()) << ": " << e.what() << '\n';
    return stereotax::report::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "stereotax: " << e.what() << '\n';
    return stereotax::report::kExitGeneric;
  }
}
