#include "libmig/common/fs.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "libmig/error.hpp"

namespace libmig::fs {

std::string read_file(const stdfs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const stdfs::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) stdfs::create_directories(path.parent_path(), ec);
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  auto tmp = path;
  tmp += ".libmig-tmp-" + std::to_string(rng() % 1000000007ULL);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::WriteFailed, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      stdfs::remove(tmp, ec);
      throw Error(ErrorKind::WriteFailed, "cannot write " + path.string());
    }
  }
  stdfs::rename(tmp, path, ec);
  if (ec) {
    stdfs::remove(tmp, ec);
    throw Error(ErrorKind::WriteFailed, "cannot replace " + path.string());
  }
}

stdfs::path normalize(const stdfs::path& path) {
  auto p = path.is_absolute() ? path : stdfs::absolute(path);
  p = p.lexically_normal();
  // "a/b/" normalizes to "a/b/" (empty filename); drop the trailing separator.
  if (!p.has_filename() && p.has_parent_path() && p != p.root_path()) p = p.parent_path();
  return p;
}

bool is_under(const stdfs::path& path, const stdfs::path& base) {
  auto p = normalize(path);
  auto b = normalize(base);
  auto pit = p.begin();
  for (auto bit = b.begin(); bit != b.end(); ++bit, ++pit) {
    if (pit == p.end() || *pit != *bit) return false;
  }
  return true;
}

std::string relative_to(const stdfs::path& path, const stdfs::path& base) {
  if (!is_under(path, base)) return {};
  return normalize(path).lexically_relative(normalize(base)).generic_string();
}

namespace {

bool skipped_dir(const std::string& name) {
  static const char* const kSkip[] = {"__pycache__", "venv", "env", "node_modules",
                                      "site-packages", "build", "dist"};
  if (!name.empty() && name.front() == '.') return true;
  return std::find(std::begin(kSkip), std::end(kSkip), name) != std::end(kSkip);
}

}  // namespace

std::vector<std::string> list_python_files(const stdfs::path& root,
                                           const std::vector<stdfs::path>& skip) {
  std::vector<std::string> out;
  std::error_code ec;
  auto base = normalize(root);
  stdfs::recursive_directory_iterator it(base, stdfs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot list " + root.string());
  for (; it != stdfs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    const auto& entry = *it;
    if (entry.is_directory()) {
      auto name = entry.path().filename().string();
      bool excluded = skipped_dir(name);
      for (const auto& s : skip) excluded = excluded || is_under(entry.path(), s);
      if (excluded) it.disable_recursion_pending();
      continue;
    }
    if (entry.is_regular_file() && entry.path().extension() == ".py")
      out.push_back(relative_to(entry.path(), base));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, std::string> read_tree(const stdfs::path& root,
                                             const std::vector<std::string>& relpaths) {
  std::map<std::string, std::string> out;
  for (const auto& rel : relpaths) out.emplace(rel, read_file(root / rel));
  return out;
}

bool is_test_file(std::string_view relpath) {
  stdfs::path p{std::string(relpath)};
  for (auto it = p.begin(); it != p.end(); ++it) {
    auto next = it;
    if (++next == p.end()) break;
    auto comp = it->string();
    if (comp == "tests" || comp == "test") return true;
  }
  auto stem = p.stem().string();
  if (p.filename() == "conftest.py") return true;
  if (stem.rfind("test_", 0) == 0) return true;
  return stem.size() > 5 && stem.compare(stem.size() - 5, 5, "_test") == 0;
}

}  // namespace libmig::fs
