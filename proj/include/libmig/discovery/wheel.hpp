#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace libmig::discovery {

/// Top-level module names a library is imported by.
struct ImportNameSet {
  std::string library;
  std::set<std::string> import_names;

  bool contains(std::string_view name) const {
    return import_names.count(std::string(name)) > 0;
  }
};

/// Read-only view of a zip container (stored and deflated entries).
class ZipArchive {
 public:
  /// Throws Error(MalformedArchive).
  static ZipArchive open(const std::filesystem::path& path);
  static ZipArchive from_bytes(std::string bytes);

  const std::vector<std::string>& names() const { return names_; }
  bool contains(std::string_view name) const { return entries_.count(std::string(name)) > 0; }
  /// Throws Error(MalformedArchive) on missing entries or corrupt data.
  std::string read(std::string_view name) const;

 private:
  struct Entry {
    std::uint16_t method;
    std::uint32_t crc;
    std::uint64_t compressed_size;
    std::uint64_t size;
    std::uint64_t local_header_offset;
  };
  std::string data_;
  std::vector<std::string> names_;
  std::map<std::string, Entry> entries_;

  void index();
};

/// Import names declared by a wheel: its `top_level.txt` record when present,
/// otherwise the top-level packages and modules of the payload. Private names
/// (leading underscore) are dropped when a public one exists.
/// Throws Error(MalformedArchive) or Error(NoImportNames).
ImportNameSet resolve_import_names(std::string_view library, const ZipArchive& wheel);
ImportNameSet resolve_import_names(std::string_view library, const std::filesystem::path& wheel);

/// Same rule applied to an installed `*.dist-info` directory (top_level.txt,
/// then RECORD).
ImportNameSet resolve_installed_import_names(std::string_view library,
                                             const std::filesystem::path& site_packages);

}  // namespace libmig::discovery
