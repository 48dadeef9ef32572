#include "libmig/pipeline/pipeline.hpp"

#include <ctime>
#include <unistd.h>

#include <fmt/chrono.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "libmig/asyncprop/async.hpp"
#include "libmig/common/fs.hpp"
#include "libmig/common/process.hpp"
#include "libmig/common/text.hpp"
#include "libmig/discovery/callgrind.hpp"
#include "libmig/discovery/imports.hpp"
#include "libmig/llm/checkpoint.hpp"
#include "libmig/llm/migrate.hpp"
#include "libmig/merge/merge.hpp"
#include "libmig/prep/requirements.hpp"

namespace libmig::pipeline {

namespace stdfs = std::filesystem;
using nlohmann::json;
using FileMap = std::map<std::string, std::string>;

namespace {

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

std::string default_run_id() {
  auto now = std::chrono::system_clock::now();
  return fmt::format("{:%Y%m%dT%H%M%S}-{}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)), ::getpid());
}

json graph_json(const discovery::CallGraph& g) {
  json nodes = json::array(), edges = json::array();
  for (const auto& n : g.nodes()) {
    json o{{"file", n.file}, {"qualname", n.qualname}, {"owner", discovery::to_string(n.owner.kind)}};
    if (n.owner.kind == discovery::OwnerKind::Library) o["import_name"] = n.owner.import_name;
    nodes.push_back(std::move(o));
  }
  for (const auto& e : g.edges()) edges.push_back({{"caller", e.caller}, {"callee", e.callee}, {"line", e.line}});
  return {{"nodes", nodes}, {"edges", edges}};
}

class Runner {
 public:
  Runner(prep::MigrationSpec spec, const Options& opt) : spec_(std::move(spec)), opt_(opt) {
    spec_.project_root = fs::normalize(spec_.project_root);
    spec_.out_dir = fs::normalize(spec_.out_dir);
    run_id_ = opt_.run_id.empty() ? default_run_id() : opt_.run_id;
    run_dir_ = spec_.out_dir / run_id_;
    report_.spec = spec_;
    manifest_ = {{"run_id", run_id_}, {"started", utc_now()}, {"stages", json::array()}, {"artifacts", json::object()}};
  }

  RunResult run() {
    stdfs::create_directories(run_dir_);
    try {
      stage("prep", [&] { prep(); });
      stage("discovery", [&] { discover(); });
      stage("llmmig", [&] { migrate(); });
      stage("merge", [&] { merge_stage(); });
      stage("async", [&] { async_stage(); });
      if (opt_.manual_fixed) stage("manual", [&] { manual_stage(); });
      stage("report", [&] { finish(); });
    } catch (const StageError& e) {
      manifest_["exit_status"] = "failed";
      manifest_["error"] = {{"stage", e.stage()}, {"kind", to_string(e.kind())}, {"message", e.what()}};
      write_manifest();
      throw;
    }
    manifest_["exit_status"] = "ok";
    write_manifest();
    return RunResult{report_, run_dir_};
  }

 private:
  prep::MigrationSpec spec_;
  const Options& opt_;
  std::string run_id_;
  stdfs::path run_dir_;
  json manifest_;
  report::MigrationRunReport report_;

  prep::EnvHandle env_;
  prep::RunOptions run_opts_;
  TestReport premig_;
  FileMap baseline_tree_;  // every project .py file before migration
  discovery::ImportNameSet names_;
  discovery::CallGraph graph_;
  FileMap originals_;      // selected files before migration
  FileMap current_;        // selected files as they are now
  std::size_t test_runs_ = 0;

  template <class F>
  void stage(const std::string& name, F&& body) {
    json entry{{"stage", name}, {"started", utc_now()}};
    spdlog::info("[{}] start", name);
    try {
      body();
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      entry["finished"] = utc_now();
      entry["ok"] = false;
      manifest_["stages"].push_back(entry);
      spdlog::error("[{}] {} ({})", name, e.what(), to_string(e.kind()));
      throw StageError(name, e);
    } catch (const std::exception& e) {
      entry["finished"] = utc_now();
      entry["ok"] = false;
      manifest_["stages"].push_back(entry);
      spdlog::error("[{}] {}", name, e.what());
      throw StageError(name, Error(ErrorKind::Io, e.what()));
    }
    entry["finished"] = utc_now();
    entry["ok"] = true;
    manifest_["stages"].push_back(entry);
  }

  void artifact(const std::string& key, const stdfs::path& p) { manifest_["artifacts"][key] = p.generic_string(); }

  void write_artifact(const std::string& key, const stdfs::path& p, std::string_view contents) {
    stdfs::create_directories(p.parent_path());
    fs::write_file_atomic(p, contents);
    artifact(key, p);
  }

  void write_manifest() {
    manifest_["finished"] = utc_now();
    manifest_["test_runs"] = test_runs_;
    fs::write_file_atomic(run_dir_ / "manifest.json", manifest_.dump(2) + "\n");
  }

  void warn(std::string msg) {
    spdlog::warn("{}", msg);
    report_.warnings.push_back(std::move(msg));
  }

  std::vector<std::string> project_files() const { return fs::list_python_files(spec_.project_root, {spec_.out_dir}); }

  prep::TestRun test(Stage s, bool profile) {
    ++test_runs_;
    auto run = prep::run_tests(env_, spec_.project_root, s, profile, run_opts_);
    artifact(fmt::format("test_report.{}", to_string(s)), run.report_path);
    if (run.profile) artifact(fmt::format("profile.{}", to_string(s)), *run.profile);
    return run;
  }

  // ---- prep -------------------------------------------------------------

  void prep() {
    baseline_tree_ = fs::read_tree(spec_.project_root, project_files());
    run_opts_.config = prep::load_project_config(spec_.out_dir);
    run_opts_.timeout = opt_.test_timeout;
    run_opts_.artifacts_dir = run_dir_ / "reports";
    if (!spec_.python_version && opt_.provision.reference_date) {
      spec_.python_version =
          prep::resolve_python_version(std::nullopt, *opt_.provision.reference_date, prep::bundled_python_releases());
      report_.spec.python_version = spec_.python_version;
      spdlog::info("[prep] python {} was current on {}", *spec_.python_version, opt_.provision.reference_date->str());
    }
    env_ = prep::provision_environment(spec_, opt_.provision);
    spdlog::info("[prep] python {} in {}", env_.interpreter_version, env_.venv_path.string());
    auto run = test(Stage::Premig, true);
    premig_ = run.report;
    if (run.profile) profile_ = *run.profile;
  }

  std::optional<stdfs::path> profile_;

  // ---- discovery ----------------------------------------------------------

  std::optional<discovery::ImportNameSet> names_from_wheel() {
    auto dir = run_dir_ / "wheels";
    stdfs::create_directories(dir);
    auto version = env_.installed_version(spec_.source_lib);
    auto req = version ? spec_.source_lib + "==" + *version : spec_.source_lib;
    std::vector<std::string> argv{env_.python().string(), "-m", "pip", "download", "--no-deps",
                                  "--only-binary=:all:", "-d", dir.string(), req, "--disable-pip-version-check"};
    argv.insert(argv.end(), opt_.provision.pip_args.begin(), opt_.provision.pip_args.end());
    ProcessOptions popts;
    popts.timeout = std::chrono::minutes(5);
    auto res = run_process(argv, popts);
    if (res.exit_code != 0) return std::nullopt;
    auto want = text::normalize_package_name(spec_.source_lib);
    for (const auto& entry : stdfs::directory_iterator(dir)) {
      auto name = entry.path().filename().string();
      if (!name.ends_with(".whl")) continue;
      if (text::normalize_package_name(name.substr(0, name.find('-'))) != want) continue;
      artifact("source_wheel", entry.path());
      return discovery::resolve_import_names(spec_.source_lib, entry.path());
    }
    return std::nullopt;
  }

  void resolve_names() {
    if (!opt_.source_import_names.empty()) {
      names_.library = spec_.source_lib;
      names_.import_names.insert(opt_.source_import_names.begin(), opt_.source_import_names.end());
      return;
    }
    try {
      if (auto n = names_from_wheel()) {
        names_ = *n;
        return;
      }
    } catch (const Error& e) {
      spdlog::warn("[discovery] wheel inspection failed: {}", e.what());
    }
    names_ = discovery::resolve_installed_import_names(spec_.source_lib, env_.site_packages_path);
  }

  void discover() {
    resolve_names();
    report_.source_import_names.assign(names_.import_names.begin(), names_.import_names.end());
    spdlog::info("[discovery] import names: {}", fmt::join(report_.source_import_names, ", "));

    std::vector<discovery::CallRecord> records;
    if (profile_) {
      try {
        records = discovery::parse_callgrind(fs::read_file(*profile_));
      } catch (const Error& e) {
        warn(fmt::format("profile ignored: {}", e.what()));
      }
    } else {
      warn("no profile from the baseline run; dynamic usage not detected");
    }
    auto site = env_.site_packages_path;
    auto root = spec_.project_root;
    graph_ = discovery::build_call_graph(
        records, [&](std::string_view f) { return discovery::classify_owner(f, root, site); }, root);
    write_artifact("call_graph", run_dir_ / "call_graph.json", graph_json(graph_).dump(2) + "\n");

    auto sel = discovery::select_migration_files(root, graph_, names_, {spec_.out_dir});
    for (const auto& f : sel.unparsable) warn(fmt::format("{}: not parsable, static scan skipped", f));
    report_.selected_files = sel.files;
    spdlog::info("[discovery] {} file(s) selected", sel.files.size());
    if (sel.files.empty()) warn("no project file uses the source library");
  }

  // ---- llm ----------------------------------------------------------------

  std::string source_version() const {
    if (auto v = env_.installed_version(spec_.source_lib)) return *v;
    auto want = text::normalize_package_name(spec_.source_lib);
    for (const auto& file : spec_.requirements_files) {
      for (const auto& r : prep::parse_requirements(fs::read_file(file)))
        if (!r.passthrough && text::normalize_package_name(r.name) == want)
          if (auto pin = r.exact_pin()) return *pin;
    }
    return "unknown";
  }

  void commit(Stage s, const FileMap& changed) {
    if (changed.empty()) return;
    auto cp = llm::apply_migrated_files(spec_.project_root, changed, s);
    auto dir = run_dir_ / "checkpoints" / std::string(to_string(s));
    llm::save_checkpoint(cp, dir);
    artifact(fmt::format("checkpoint.{}", to_string(s)), dir);
    for (const auto& [p, t] : changed)
      if (current_.count(p)) current_[p] = t;
  }

  void record(Stage s, const TestReport& post) {
    report::StageCorrectness sc;
    sc.stage = s;
    try {
      sc = report::compare_reports(premig_, post);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoBaselinePassingTests) throw;
      if (report_.per_stage.empty()) warn("no test passed before migration; correctness is undefined");
    }
    sc.stage = s;
    if (sc.correctness) spdlog::info("[{}] correctness {}", to_string(s), sc.correctness->percent());
    report_.per_stage.push_back(sc);
  }

  void inherit(Stage s) {
    auto sc = report_.per_stage.back();
    sc.stage = s;
    sc.inherited = true;
    report_.per_stage.push_back(sc);
    spdlog::info("[{}] not applicable", to_string(s));
  }

  bool fully_correct() const {
    const auto& last = report_.per_stage.back();
    return last.correctness && last.correctness->num == last.correctness->den;
  }

  void migrate() {
    std::vector<std::string> paths;
    for (const auto& f : report_.selected_files) paths.push_back(f.path);
    originals_ = fs::read_tree(spec_.project_root, paths);
    current_ = originals_;
    report_.source_version = source_version();

    llm::MigrationRequest req{spec_.source_lib, report_.source_version, spec_.target_lib, spec_.target_version};
    auto complete = opt_.completion ? opt_.completion : llm::make_http_completion(opt_.endpoint);
    auto results = llm::migrate_files(originals_, req, complete, opt_.parallel);

    FileMap migrated;
    for (const auto& r : results) {
      if (!r.prompt.empty()) write_artifact("prompt." + r.path, run_dir_ / "prompts" / (r.path + ".txt"), r.prompt);
      if (r.response)
        write_artifact("response." + r.path, run_dir_ / "responses" / (r.path + ".md"), *r.response);
      if (r.code) {
        migrated.emplace(r.path, *r.code);
      } else {
        report_.file_failures.push_back({r.path, std::string(to_string(*r.error)), r.message});
        warn(fmt::format("{}: left unmigrated ({})", r.path, to_string(*r.error)));
      }
    }
    commit(Stage::LlmMig, migrated);
    record(Stage::LlmMig, test(Stage::LlmMig, false).report);
  }

  // ---- post-processing ------------------------------------------------------

  void merge_stage() {
    if (fully_correct()) return inherit(Stage::Merge);
    FileMap merged;
    for (const auto& [path, now] : current_) {
      const auto& before = originals_.at(path);
      if (before == now) continue;
      auto hunks = merge::classify_hunks(before, now, names_);
      write_artifact("hunks." + path, run_dir_ / "hunks" / (path + ".json"), merge::to_json(hunks).dump(2) + "\n");
      if (!merge::any_skipped(hunks)) continue;
      auto result = merge::merge_skipped(before, now, hunks);
      for (auto& w : result.warnings) warn(fmt::format("{}: {}", path, w));
      spdlog::info("[merge] {}: restored {} hunk(s)", path, result.merged_hunks);
      merged.emplace(path, std::move(result.text));
    }
    if (merged.empty()) return inherit(Stage::Merge);
    commit(Stage::Merge, merged);
    record(Stage::Merge, test(Stage::Merge, false).report);
  }

  void async_stage() {
    if (fully_correct()) return inherit(Stage::Async);
    std::set<asyncprop::FnKey> asynced;
    for (const auto& [path, now] : current_) {
      try {
        for (auto& q : asyncprop::find_asynced_functions(originals_.at(path), now))
          asynced.insert(asyncprop::FnKey{path, std::move(q)});
      } catch (const Error& e) {
        warn(fmt::format("{}: async detection skipped: {}", path, e.what()));
      }
    }
    if (asynced.empty()) return inherit(Stage::Async);

    auto plan = asyncprop::compute_async_plan(asynced, graph_, spec_.project_root);
    for (auto& w : plan.warnings) warn(w);
    auto tree = fs::read_tree(spec_.project_root, project_files());
    auto result = asyncprop::apply_async_plan(tree, plan);
    for (auto& w : result.warnings) warn(w);
    json plan_json{{"asynced", json::array()}, {"to_async", json::array()}, {"to_await", json::array()}};
    for (const auto& k : plan.asynced) plan_json["asynced"].push_back(k.file + "::" + k.qualname);
    for (const auto& k : plan.to_async) plan_json["to_async"].push_back(k.file + "::" + k.qualname);
    for (const auto& s : plan.to_await)
      plan_json["to_await"].push_back({{"file", s.file}, {"line", s.line}, {"caller", s.caller},
                                       {"callee", s.callee.file + "::" + s.callee.qualname}});
    write_artifact("async_plan", run_dir_ / "async_plan.json", plan_json.dump(2) + "\n");

    if (result.files.empty()) return inherit(Stage::Async);
    if (result.decorated && !env_.installed_version(opt_.asyncio_package)) {
      spdlog::info("[async] installing {}", opt_.asyncio_package);
      prep::install_packages(env_, {opt_.asyncio_package}, opt_.provision);
    }
    commit(Stage::Async, result.files);
    record(Stage::Async, test(Stage::Async, false).report);
  }

  FileMap auto_tree_;

  void manual_stage() {
    auto dir = fs::normalize(*opt_.manual_fixed);
    if (!stdfs::is_directory(dir))
      throw Error(ErrorKind::Validation, "manual snapshot is not a directory: " + dir.string());
    auto_tree_ = fs::read_tree(spec_.project_root, project_files());
    auto manual = fs::read_tree(dir, fs::list_python_files(dir));
    FileMap before, changed;
    for (const auto& [p, t] : manual) {
      auto it = auto_tree_.find(p);
      if (it != auto_tree_.end()) before.emplace(p, it->second);
      if (it == auto_tree_.end() || it->second != t) changed.emplace(p, t);
    }
    report_.migloc_manual = report::count_mig_loc(before, manual);
    if (!changed.empty()) {
      auto cp = llm::apply_migrated_files(spec_.project_root, changed, Stage::Manual, true);
      auto cdir = run_dir_ / "checkpoints" / "manual";
      llm::save_checkpoint(cp, cdir);
      artifact("checkpoint.manual", cdir);
    }
    record(Stage::Manual, test(Stage::Manual, false).report);
  }

  // ---- report ---------------------------------------------------------------

  void finish() {
    if (auto_tree_.empty()) auto_tree_ = fs::read_tree(spec_.project_root, project_files());
    report_.migloc_auto = report::count_mig_loc(baseline_tree_, auto_tree_);

    // Status reflects the last automated stage; a manual stage only feeds effort.
    const report::StageCorrectness* final_auto = nullptr;
    for (const auto& s : report_.per_stage)
      if (s.stage != Stage::Manual) final_auto = &s;
    if (final_auto && final_auto->correctness) report_.status = report::determine_status(*final_auto);

    if (report_.migloc_manual) {
      if (*report_.migloc_auto + *report_.migloc_manual > 0)
        report_.effort = report::compute_effort(*report_.migloc_auto, *report_.migloc_manual);
      else
        warn("no changes in either phase; effort undefined");
    }
    auto text = report::to_json(report_).dump(2) + "\n";
    write_artifact("run_report", run_dir_ / "run_report.json", text);
    fs::write_file_atomic(spec_.out_dir / "run_report.json", text);
    if (report_.status) spdlog::info("[report] status {}", report::to_string(*report_.status));
  }
};

}  // namespace

RunResult run_migration(const prep::MigrationSpec& spec, const Options& options) {
  prep::validate(spec);
  return Runner(spec, options).run();
}

}  // namespace libmig::pipeline
