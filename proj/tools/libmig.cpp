// libmig: migrate a Python project from one library to another.
//
//   libmig run    --project P --source-lib A --target-lib B --target-version V
//                 --requirements R [--requirements R2] --model M --api-base URL
//                 --out-dir O [--manual-fixed DIR] ...
//   libmig graph  --profile F --project P --site-packages S --import-names yaml
//   libmig hunks  ORIGINAL MIGRATED [--import-names yaml]
//   libmig grade  PREMIG.xml POST.xml
//
// Exit codes: 0 success, 2 invalid input, 3 a stage failed.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "libmig/common/fs.hpp"
#include "libmig/discovery/callgrind.hpp"
#include "libmig/discovery/imports.hpp"
#include "libmig/discovery/selection.hpp"
#include "libmig/error.hpp"
#include "libmig/merge/merge.hpp"
#include "libmig/pipeline/pipeline.hpp"
#include "libmig/prep/test_report.hpp"
#include "libmig/report/metrics.hpp"

namespace {

using namespace libmig;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitStage = 3;

discovery::ImportNameSet name_set(const std::string& library, const std::vector<std::string>& names) {
  discovery::ImportNameSet s;
  s.library = library;
  for (const auto& n : names)
    if (!n.empty()) s.import_names.insert(n);
  return s;
}

struct RunArgs {
  prep::MigrationSpec spec;
  std::string python_version;
  std::string api_key_env = "OPENAI_API_KEY";
  unsigned parallel = 4;
  std::string manual_fixed;
  std::string run_id;
  std::string python_exe;
  std::string shim;
  std::string reference_date;
  std::string release_history;
  std::vector<std::string> pip_args;
  std::vector<std::string> support_packages{"pytest", "pprofile"};
  std::vector<std::string> source_import_names;
  int max_retries = 5;
  long test_timeout_s = 15 * 60;
};

int run_command(RunArgs& a) {
  if (!a.python_version.empty()) a.spec.python_version = a.python_version;

  pipeline::Options opt;
  opt.parallel = a.parallel;
  opt.run_id = a.run_id;
  opt.source_import_names = a.source_import_names;
  opt.test_timeout = std::chrono::seconds(a.test_timeout_s);
  if (!a.manual_fixed.empty()) opt.manual_fixed = a.manual_fixed;
  opt.endpoint = llm::Endpoint{a.spec.api_base_url, a.spec.model_id, a.api_key_env};
  opt.endpoint.max_retries = a.max_retries;

  auto& prov = opt.provision;
  prov.host_python = a.python_exe;
  prov.pip_args = a.pip_args;
  prov.support_packages = a.support_packages;
  if (a.shim.empty()) {
    if (const char* env = std::getenv("LIBMIG_SHIM")) a.shim = env;
  }
  if (a.shim.empty() || !std::filesystem::is_regular_file(a.shim))
    throw Error(ErrorKind::Validation, "runner shim not found; pass --shim or set LIBMIG_SHIM");
  prov.shim_source = a.shim;

  std::unique_ptr<prep::ReleaseHistory> history;
  if (!a.reference_date.empty()) {
    auto d = prep::Date::parse(a.reference_date);
    if (!d) throw Error(ErrorKind::Validation, "bad --reference-date '" + a.reference_date + "'");
    prov.reference_date = *d;
    if (!a.release_history.empty())
      history = std::make_unique<prep::SnapshotReleaseHistory>(
          prep::SnapshotReleaseHistory::from_json(fs::read_file(a.release_history)));
    else
      history = std::make_unique<prep::PypiReleaseHistory>();
    prov.registry = history.get();
  }

  auto result = pipeline::run_migration(a.spec, opt);
  const auto& r = result.report;
  for (const auto& s : r.per_stage)
    std::cout << fmt::format("{:<8} {}{}\n", to_string(s.stage),
                             s.correctness ? s.correctness->percent() : std::string("n/a"),
                             s.inherited ? " (inherited)" : "");
  std::cout << "status  " << (r.status ? std::string(report::to_string(*r.status)) : "n/a") << "\n";
  std::cout << "report  " << (result.run_dir / "run_report.json").string() << "\n";
  return 0;
}

struct GraphArgs {
  std::string profile;
  std::string project;
  std::string site_packages;
  std::string source_lib;
  std::vector<std::string> import_names;
};

int graph_command(const GraphArgs& a) {
  auto root = fs::normalize(a.project);
  auto site = a.site_packages.empty() ? std::filesystem::path{} : fs::normalize(a.site_packages);
  auto records = discovery::parse_callgrind(fs::read_file(a.profile));
  auto graph = discovery::build_call_graph(
      records, [&](std::string_view f) { return discovery::classify_owner(f, root, site); }, root);

  auto show = [&](const std::string& file) {
    auto rel = fs::relative_to(file, root);
    return rel.empty() ? file : rel;
  };
  json out{{"nodes", json::array()}, {"edges", json::array()}};
  for (const auto& n : graph.nodes()) {
    json o{{"file", show(n.file)}, {"qualname", n.qualname}, {"owner", discovery::to_string(n.owner.kind)}};
    if (n.owner.kind == discovery::OwnerKind::Library) o["import_name"] = n.owner.import_name;
    out["nodes"].push_back(o);
  }
  for (const auto& e : graph.edges()) {
    const auto& c = graph.node(e.caller);
    const auto& d = graph.node(e.callee);
    out["edges"].push_back({{"caller", show(c.file) + "::" + c.qualname},
                            {"callee", show(d.file) + "::" + d.qualname},
                            {"line", e.line}});
  }
  if (!a.import_names.empty()) {
    auto sel = discovery::select_migration_files(root, graph, name_set(a.source_lib, a.import_names));
    out["selected"] = json::array();
    for (const auto& f : sel.files) {
      std::string usage = f.static_hit && f.dynamic_hit ? "static+dynamic" : f.static_hit ? "static" : "dynamic-only";
      out["selected"].push_back({{"path", f.path}, {"usage", usage}});
    }
    out["excluded_tests"] = sel.excluded_tests;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int hunks_command(const std::string& original, const std::string& migrated, const std::vector<std::string>& names) {
  auto hunks = merge::classify_hunks(fs::read_file(original), fs::read_file(migrated), name_set("", names));
  std::cout << merge::to_json(hunks).dump(2) << "\n";
  return 0;
}

int grade_command(const std::string& premig, const std::string& post, const std::string& stage_name) {
  auto stage = parse_stage(stage_name);
  if (!stage) throw Error(ErrorKind::Validation, "unknown stage '" + stage_name + "'");
  auto before = prep::parse_junit_xml(fs::read_file(premig), Stage::Premig);
  auto after = prep::parse_junit_xml(fs::read_file(post), *stage);
  auto sc = report::compare_reports(before, after);
  std::cout << fmt::format("{} {} ({}/{}) {}\n", to_string(sc.stage), sc.correctness->percent(), sc.still_passing,
                           sc.baseline_passing, report::to_string(report::determine_status(sc)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("libmig");
  logger->set_pattern("%^%l%$ %v");
  spdlog::set_default_logger(logger);

  CLI::App app{"Migrate a Python project between analogous libraries"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run the full migration pipeline");
  run->set_config("--config", "", "TOML/INI file with option defaults");
  run->add_option("--project", ra.spec.project_root, "Project root")->required();
  run->add_option("--source-lib", ra.spec.source_lib, "Library to migrate away from")->required();
  run->add_option("--target-lib", ra.spec.target_lib, "Library to migrate to")->required();
  run->add_option("--target-version", ra.spec.target_version, "Version of the target library")->required();
  run->add_option("--python-version", ra.python_version, "Interpreter version, e.g. 3.11");
  run->add_option("--requirements", ra.spec.requirements_files, "Requirements file (repeatable)")->required();
  run->add_option("--model", ra.spec.model_id, "Model id")->required();
  run->add_option("--api-base", ra.spec.api_base_url, "OpenAI-compatible base URL")->required();
  run->add_option("--api-key-env", ra.api_key_env, "Environment variable holding the API key")
      ->capture_default_str();
  run->add_option("--out-dir", ra.spec.out_dir, "Where the venv and run artifacts go")->required();
  run->add_option("--parallel", ra.parallel, "Concurrent model requests")->capture_default_str()->check(
      CLI::Range(1u, 64u));
  run->add_option("--manual-fixed", ra.manual_fixed, "Manually fixed project snapshot");
  run->add_option("--run-id", ra.run_id, "Artifact directory name under --out-dir");
  run->add_option("--python-exe", ra.python_exe, "Interpreter used to create the venv");
  run->add_option("--shim", ra.shim, "Runner shim script (default: $LIBMIG_SHIM)");
  run->add_option("--reference-date", ra.reference_date,
                  "Pin unpinned requirements and the interpreter to what was current on YYYY-MM-DD");
  run->add_option("--release-history", ra.release_history, "Offline release-history JSON snapshot");
  run->add_option("--pip-arg", ra.pip_args, "Extra pip install argument (repeatable)")->allow_extra_args(false);
  run->add_option("--support-package", ra.support_packages, "Packages the runner shim needs")
      ->capture_default_str();
  run->add_option("--source-import-names", ra.source_import_names, "Import names of the source library")
      ->delimiter(',');
  run->add_option("--max-retries", ra.max_retries, "Retries for HTTP 429/5xx")->capture_default_str();
  run->add_option("--test-timeout", ra.test_timeout_s, "Seconds per test run")->capture_default_str();

  GraphArgs ga;
  auto* graph = app.add_subcommand("graph", "Print the ownership-classified call graph of a profile");
  graph->add_option("--profile", ga.profile, "CallGrind profile")->required()->check(CLI::ExistingFile);
  graph->add_option("--project", ga.project, "Project root")->required()->check(CLI::ExistingDirectory);
  graph->add_option("--site-packages", ga.site_packages, "site-packages of the environment");
  graph->add_option("--source-lib", ga.source_lib, "Source library name");
  graph->add_option("--import-names", ga.import_names, "Source import names; enables file selection")
      ->delimiter(',');

  std::string original, migrated;
  std::vector<std::string> hunk_names;
  auto* hunks = app.add_subcommand("hunks", "Classify the diff hunks between two versions of a file");
  hunks->add_option("original", original)->required()->check(CLI::ExistingFile);
  hunks->add_option("migrated", migrated)->required()->check(CLI::ExistingFile);
  hunks->add_option("--import-names", hunk_names, "Source import names")->delimiter(',');

  std::string premig_xml, post_xml, grade_stage = "llmmig";
  auto* grade = app.add_subcommand("grade", "Correctness of a post-migration test report");
  grade->add_option("premig", premig_xml, "Baseline JUnit XML")->required()->check(CLI::ExistingFile);
  grade->add_option("post", post_xml, "Post-migration JUnit XML")->required()->check(CLI::ExistingFile);
  grade->add_option("--stage", grade_stage, "Stage label")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*run) return run_command(ra);
    if (*graph) return graph_command(ga);
    if (*hunks) return hunks_command(original, migrated, hunk_names);
    if (*grade) return grade_command(premig_xml, post_xml, grade_stage);
  } catch (const Error& e) {
    spdlog::error("{} ({})", e.what(), to_string(e.kind()));
    return e.kind() == ErrorKind::Validation ? kExitValidation : kExitStage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitStage;
  }
  return 0;
}
