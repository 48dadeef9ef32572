#include "libmig/prep/project_config.hpp"

#include "libmig/common/fs.hpp"
#include "libmig/common/text.hpp"
#include "libmig/error.hpp"

namespace libmig::prep {

namespace {

std::string unquote(std::string_view v) {
  v = text::trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
    return std::string(v.substr(1, v.size() - 2));
  return std::string(v);
}

}  // namespace

ProjectConfig parse_project_config(std::string_view content) {
  ProjectConfig cfg;
  std::string section;
  int lineno = 0;
  for (const auto& raw : text::split_lines(content)) {
    ++lineno;
    auto line = text::trim(text::strip_eol(raw));
    if (line.empty() || line.front() == '#') continue;
    auto where = "project config line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::Validation, where + ": unterminated section");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      if (section != "env") throw Error(ErrorKind::Validation, where + ": unknown section " + section);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::Validation, where + ": expected key = value");
    std::string key(text::trim(line.substr(0, eq)));
    std::string value = unquote(line.substr(eq + 1));
    if (section == "env") {
      cfg.env[key] = value;
    } else if (key == "test_args") {
      cfg.test_args = text::split_ws(value);
    } else if (key == "timeout_s") {
      try {
        cfg.timeout = std::chrono::seconds(std::stol(value));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Validation, where + ": timeout_s must be an integer");
      }
    } else {
      throw Error(ErrorKind::Validation, where + ": unknown key " + key);
    }
  }
  return cfg;
}

ProjectConfig load_project_config(const std::filesystem::path& out_dir) {
  auto path = out_dir / "project.toml";
  if (!std::filesystem::exists(path)) return {};
  return parse_project_config(fs::read_file(path));
}

}  // namespace libmig::prep
