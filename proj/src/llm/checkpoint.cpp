#include "libmig/llm/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include "libmig/common/fs.hpp"
#include "libmig/error.hpp"

namespace libmig::llm {

namespace {

std::filesystem::path resolve(const std::filesystem::path& root, const std::string& rel) {
  auto p = fs::normalize(root / rel);
  if (std::filesystem::path(rel).is_absolute() || !fs::is_under(p, fs::normalize(root)))
    throw Error(ErrorKind::Validation, "path escapes the project: '" + rel + "'");
  return p;
}

}  // namespace

FileCheckpoint apply_migrated_files(const std::filesystem::path& project_root,
                                    const std::map<std::string, std::string>& migrated, Stage stage,
                                    bool allow_new) {
  FileCheckpoint cp;
  cp.stage = stage;
  for (const auto& [rel, _] : migrated) {
    auto p = resolve(project_root, rel);
    if (std::filesystem::is_regular_file(p)) {
      cp.files.emplace(rel, fs::read_file(p));
    } else if (allow_new) {
      cp.created.insert(rel);
    } else {
      throw Error(ErrorKind::Validation, "no such project file: '" + rel + "'");
    }
  }

  FileCheckpoint done{stage, {}, {}};
  try {
    for (const auto& [rel, contents] : migrated) {
      auto p = resolve(project_root, rel);
      if (cp.created.count(rel)) {
        std::filesystem::create_directories(p.parent_path());
        done.created.insert(rel);
      } else {
        done.files.emplace(rel, cp.files.at(rel));
      }
      fs::write_file_atomic(p, contents);
    }
  } catch (const std::exception& e) {
    restore_checkpoint(project_root, done);
    if (auto* err = dynamic_cast<const Error*>(&e); err && err->kind() == ErrorKind::WriteFailed) throw;
    throw Error(ErrorKind::WriteFailed, e.what());
  }
  return cp;
}

void restore_checkpoint(const std::filesystem::path& project_root, const FileCheckpoint& checkpoint) {
  for (const auto& [rel, contents] : checkpoint.files) fs::write_file_atomic(resolve(project_root, rel), contents);
  for (const auto& rel : checkpoint.created) {
    std::error_code ec;
    std::filesystem::remove(resolve(project_root, rel), ec);
  }
}

void save_checkpoint(const FileCheckpoint& checkpoint, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "files");
  nlohmann::json j;
  j["stage"] = to_string(checkpoint.stage);
  j["files"] = nlohmann::json::array();
  for (const auto& [rel, contents] : checkpoint.files) {
    j["files"].push_back(rel);
    auto p = dir / "files" / rel;
    std::filesystem::create_directories(p.parent_path());
    fs::write_file_atomic(p, contents);
  }
  j["created"] = checkpoint.created;
  fs::write_file_atomic(dir / "checkpoint.json", j.dump(2) + "\n");
}

FileCheckpoint load_checkpoint(const std::filesystem::path& dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(fs::read_file(dir / "checkpoint.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, "bad checkpoint in " + dir.string() + ": " + e.what());
  }
  FileCheckpoint cp;
  auto stage = parse_stage(j.value("stage", ""));
  if (!stage) throw Error(ErrorKind::Validation, "bad checkpoint stage in " + dir.string());
  cp.stage = *stage;
  for (const auto& rel : j.value("files", nlohmann::json::array()))
    cp.files.emplace(rel.get<std::string>(), fs::read_file(dir / "files" / rel.get<std::string>()));
  for (const auto& rel : j.value("created", nlohmann::json::array())) cp.created.insert(rel.get<std::string>());
  return cp;
}

}  // namespace libmig::llm
