#include "libmig/discovery/wheel.hpp"

#include <zlib.h>

#include <cstring>

#include "libmig/common/fs.hpp"
#include "libmig/common/text.hpp"
#include "libmig/error.hpp"

namespace libmig::discovery {

namespace stdfs = std::filesystem;

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::MalformedArchive, what);
}

std::uint16_t u16(const std::string& d, std::size_t at) {
  if (at + 2 > d.size()) malformed("truncated archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(d[at]) |
                                    static_cast<unsigned char>(d[at + 1]) << 8);
}

std::uint32_t u32(const std::string& d, std::size_t at) {
  return static_cast<std::uint32_t>(u16(d, at)) | static_cast<std::uint32_t>(u16(d, at + 2)) << 16;
}

std::uint64_t u64(const std::string& d, std::size_t at) {
  return static_cast<std::uint64_t>(u32(d, at)) | static_cast<std::uint64_t>(u32(d, at + 4)) << 32;
}

constexpr std::uint32_t kEndOfCentralDir = 0x06054b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kLocalHeader = 0x04034b50;

}  // namespace

ZipArchive ZipArchive::open(const stdfs::path& path) {
  std::string bytes;
  try {
    bytes = fs::read_file(path);
  } catch (const Error&) {
    malformed("cannot read archive " + path.string());
  }
  return from_bytes(std::move(bytes));
}

ZipArchive ZipArchive::from_bytes(std::string bytes) {
  ZipArchive z;
  z.data_ = std::move(bytes);
  z.index();
  return z;
}

void ZipArchive::index() {
  const std::string& d = data_;
  if (d.size() < 22) malformed("not a zip archive");
  // The end-of-central-directory record sits within the last 64 KiB + 22 bytes.
  std::size_t eocd = std::string::npos;
  std::size_t lowest = d.size() > 65557 ? d.size() - 65557 : 0;
  for (std::size_t p = d.size() - 22 + 1; p-- > lowest;) {
    if (u32(d, p) == kEndOfCentralDir) {
      eocd = p;
      break;
    }
  }
  if (eocd == std::string::npos) malformed("no end of central directory");
  std::uint64_t count = u16(d, eocd + 10);
  std::uint64_t cd_offset = u32(d, eocd + 16);
  if (cd_offset == 0xFFFFFFFF || count == 0xFFFF) {
    // zip64 locator precedes the classic record.
    if (eocd < 20 || u32(d, eocd - 20) != 0x07064b50) malformed("zip64 locator missing");
    std::uint64_t z64 = u64(d, eocd - 20 + 8);
    if (z64 + 56 > d.size() || u32(d, z64) != 0x06064b50) malformed("zip64 record missing");
    count = u64(d, z64 + 32);
    cd_offset = u64(d, z64 + 48);
  }
  std::size_t p = cd_offset;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (u32(d, p) != kCentralHeader) malformed("bad central directory entry");
    Entry e{};
    e.method = u16(d, p + 10);
    e.crc = u32(d, p + 16);
    e.compressed_size = u32(d, p + 20);
    e.size = u32(d, p + 24);
    std::size_t name_len = u16(d, p + 28);
    std::size_t extra_len = u16(d, p + 30);
    std::size_t comment_len = u16(d, p + 32);
    e.local_header_offset = u32(d, p + 42);
    if (p + 46 + name_len + extra_len > d.size()) malformed("truncated central directory");
    std::string name = d.substr(p + 46, name_len);
    // zip64 extended information in the extra field.
    std::size_t x = p + 46 + name_len, xend = x + extra_len;
    while (x + 4 <= xend) {
      std::uint16_t id = u16(d, x), len = u16(d, x + 2);
      if (id == 0x0001) {
        std::size_t q = x + 4;
        if (e.size == 0xFFFFFFFF) { e.size = u64(d, q); q += 8; }
        if (e.compressed_size == 0xFFFFFFFF) { e.compressed_size = u64(d, q); q += 8; }
        if (e.local_header_offset == 0xFFFFFFFF) e.local_header_offset = u64(d, q);
      }
      x += 4 + len;
    }
    names_.push_back(name);
    entries_.emplace(std::move(name), e);
    p += 46 + name_len + extra_len + comment_len;
  }
}

std::string ZipArchive::read(std::string_view name) const {
  auto it = entries_.find(std::string(name));
  if (it == entries_.end()) malformed("archive has no entry " + std::string(name));
  const Entry& e = it->second;
  const std::string& d = data_;
  std::size_t lh = e.local_header_offset;
  if (u32(d, lh) != kLocalHeader) malformed("bad local header for " + std::string(name));
  std::size_t start = lh + 30 + u16(d, lh + 26) + u16(d, lh + 28);
  if (start + e.compressed_size > d.size()) malformed("truncated entry " + std::string(name));

  std::string out;
  if (e.method == 0) {
    out = d.substr(start, e.compressed_size);
  } else if (e.method == 8) {
    out.resize(e.size);
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) malformed("inflate init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(d.data() + start));
    zs.avail_in = static_cast<uInt>(e.compressed_size);
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != e.size) malformed("corrupt deflate data in " + std::string(name));
  } else {
    malformed("unsupported compression method " + std::to_string(e.method));
  }
  auto crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size()));
  if (crc != e.crc) malformed("CRC mismatch in " + std::string(name));
  return out;
}

namespace {

std::set<std::string> names_from_top_level(std::string_view content) {
  std::set<std::string> out;
  for (const auto& line : text::split_lines(content)) {
    auto name = std::string(text::trim(line));
    // Entries like "google/protobuf" name nested namespace packages; the
    // importable top level is the first segment.
    name = name.substr(0, name.find('/'));
    if (text::is_identifier(name)) out.insert(name);
  }
  return out;
}

/// Top-level importable name for a payload path, if any.
std::string top_level_of(std::string_view path) {
  auto slash = path.find('/');
  std::string first(path.substr(0, slash));
  if (first.ends_with(".dist-info") || first.ends_with(".data") || first.ends_with(".libs") ||
      first.ends_with(".egg-info") || first == "__pycache__")
    return {};
  if (slash != std::string_view::npos) {
    // Only packages that hold Python code count.
    auto rest = path.substr(slash + 1);
    if (!(rest.ends_with(".py") || rest.ends_with(".so") || rest.ends_with(".pyd") ||
          rest.ends_with(".pyi")))
      return {};
    return text::is_identifier(first) ? first : std::string{};
  }
  for (const char* ext : {".py", ".so", ".pyd"}) {
    if (first.ends_with(ext)) {
      auto stem = first.substr(0, first.find('.'));
      return text::is_identifier(stem) ? stem : std::string{};
    }
  }
  return {};
}

ImportNameSet finish(std::string_view library, std::set<std::string> names) {
  std::set<std::string> pub;
  for (const auto& n : names)
    if (n.front() != '_') pub.insert(n);
  ImportNameSet out{std::string(library), pub.empty() ? std::move(names) : std::move(pub)};
  if (out.import_names.empty())
    throw Error(ErrorKind::NoImportNames, "no import names found for " + std::string(library));
  return out;
}

bool dist_info_matches(std::string_view dir, std::string_view library) {
  if (!dir.ends_with(".dist-info")) return false;
  auto stem = dir.substr(0, dir.size() - std::string_view(".dist-info").size());
  auto dash = stem.find('-');
  auto name = stem.substr(0, dash);
  return text::normalize_package_name(name) == text::normalize_package_name(library);
}

}  // namespace

ImportNameSet resolve_import_names(std::string_view library, const ZipArchive& wheel) {
  std::string dist_info;
  for (const auto& name : wheel.names()) {
    auto first = name.substr(0, name.find('/'));
    if (first.ends_with(".dist-info")) {
      if (dist_info.empty() || dist_info_matches(first, library)) dist_info = first;
    }
  }
  if (dist_info.empty()) malformed("wheel has no .dist-info directory");

  auto top_level = dist_info + "/top_level.txt";
  if (wheel.contains(top_level)) {
    auto names = names_from_top_level(wheel.read(top_level));
    if (!names.empty()) return finish(library, std::move(names));
  }
  std::set<std::string> names;
  for (const auto& path : wheel.names()) {
    auto top = top_level_of(path);
    if (!top.empty()) names.insert(top);
  }
  return finish(library, std::move(names));
}

ImportNameSet resolve_import_names(std::string_view library, const stdfs::path& wheel) {
  return resolve_import_names(library, ZipArchive::open(wheel));
}

ImportNameSet resolve_installed_import_names(std::string_view library,
                                             const stdfs::path& site_packages) {
  std::error_code ec;
  for (const auto& entry : stdfs::directory_iterator(site_packages, ec)) {
    auto dir = entry.path().filename().string();
    if (!entry.is_directory() || !dist_info_matches(dir, library)) continue;
    auto top_level = entry.path() / "top_level.txt";
    if (stdfs::exists(top_level)) {
      auto names = names_from_top_level(fs::read_file(top_level));
      if (!names.empty()) return finish(library, std::move(names));
    }
    std::set<std::string> names;
    auto record = entry.path() / "RECORD";
    if (stdfs::exists(record)) {
      for (const auto& line : text::split_lines(fs::read_file(record))) {
        auto path = line.substr(0, line.find(','));
        auto top = top_level_of(path);
        if (!top.empty()) names.insert(top);
      }
    }
    return finish(library, std::move(names));
  }
  throw Error(ErrorKind::NoImportNames,
              "no installed metadata for " + std::string(library) + " in " + site_packages.string());
}

}  // namespace libmig::discovery
