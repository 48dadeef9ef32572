#include "libmig/report/run_report.hpp"

#include <nlohmann/json.hpp>

#include "libmig/common/fs.hpp"

namespace libmig::report {

using nlohmann::json;

json to_json(const StageCorrectness& s) {
  json j{
      {"stage", to_string(s.stage)},
      {"baseline_passing", s.baseline_passing},
      {"still_passing", s.still_passing},
      {"inherited", s.inherited},
  };
  if (s.correctness) {
    j["correctness"] = s.correctness->value();
    j["correctness_exact"] = s.correctness->exact();
    j["correctness_percent"] = s.correctness->percent();
  } else {
    j["correctness"] = nullptr;
    j["correctness_exact"] = nullptr;
    j["correctness_percent"] = nullptr;
  }
  return j;
}

json to_json(const MigrationRunReport& r) {
  const auto& s = r.spec;
  json spec{
      {"project_root", fs::normalize(s.project_root).generic_string()},
      {"source_lib", s.source_lib},
      {"target_lib", s.target_lib},
      {"target_version", s.target_version},
      {"python_version", s.python_version ? json(*s.python_version) : json(nullptr)},
      {"model_id", s.model_id},
      {"api_base_url", s.api_base_url},
      {"out_dir", fs::normalize(s.out_dir).generic_string()},
  };
  spec["requirements_files"] = json::array();
  for (const auto& p : s.requirements_files) spec["requirements_files"].push_back(fs::normalize(p).generic_string());

  json j;
  j["schema_version"] = 1;
  j["spec"] = std::move(spec);
  j["source_version"] = r.source_version;
  j["source_import_names"] = r.source_import_names;
  j["selected_files"] = json::array();
  for (const auto& f : r.selected_files)
    j["selected_files"].push_back({{"path", f.path}, {"static", f.static_hit}, {"dynamic", f.dynamic_hit}});
  j["per_stage"] = json::array();
  for (const auto& st : r.per_stage) j["per_stage"].push_back(to_json(st));
  j["status"] = r.status ? json(to_string(*r.status)) : json(nullptr);
  j["migloc_auto"] = r.migloc_auto ? json(*r.migloc_auto) : json(nullptr);
  j["migloc_manual"] = r.migloc_manual ? json(*r.migloc_manual) : json(nullptr);
  j["effort_auto"] = r.effort ? json(r.effort->automatic) : json(nullptr);
  j["effort_manual"] = r.effort ? json(r.effort->manual) : json(nullptr);
  j["warnings"] = r.warnings;
  j["file_failures"] = json::array();
  for (const auto& f : r.file_failures)
    j["file_failures"].push_back({{"path", f.path}, {"error", f.error}, {"message", f.message}});
  return j;
}

}  // namespace libmig::report
