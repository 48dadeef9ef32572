#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace libmig::fs {

namespace stdfs = std::filesystem;

std::string read_file(const stdfs::path& path);

/// Writes through a sibling temp file and renames it over `path`.
void write_file_atomic(const stdfs::path& path, std::string_view contents);

/// Lexically normalized absolute form of `path` (no symlink resolution).
stdfs::path normalize(const stdfs::path& path);

/// True when `path` equals `base` or lies below it, compared lexically.
bool is_under(const stdfs::path& path, const stdfs::path& base);

/// `path` relative to `base` with '/' separators; empty when not under base.
std::string relative_to(const stdfs::path& path, const stdfs::path& base);

/// Every `*.py` file below `root` as sorted relative paths. Hidden
/// directories, caches, virtual environments and anything under one of
/// `skip` are not descended into.
std::vector<std::string> list_python_files(const stdfs::path& root,
                                           const std::vector<stdfs::path>& skip = {});

/// Reads each relative path below root into a map.
std::map<std::string, std::string> read_tree(const stdfs::path& root,
                                             const std::vector<std::string>& relpaths);

/// Conventional test-discovery match: test_*.py, *_test.py, conftest.py or a
/// `tests` / `test` directory component.
bool is_test_file(std::string_view relpath);

}  // namespace libmig::fs
