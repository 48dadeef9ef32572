#include "libmig/prep/versions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <ctime>
#include <limits>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "libmig/common/text.hpp"
#include "libmig/error.hpp"

namespace libmig::prep {

namespace detail {
extern const std::string_view kPythonReleasesJson;
}

namespace {

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : kDays[m - 1];
}

}  // namespace

std::optional<Date> Date::parse(std::string_view s) {
  s = text::trim(s);
  if (s.size() > 10 && (s[10] == 'T' || s[10] == ' ')) s = s.substr(0, 10);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = parse_int(s.substr(0, 4));
  auto m = parse_int(s.substr(5, 2));
  auto d = parse_int(s.substr(8, 2));
  if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > days_in_month(*y, *m))
    return std::nullopt;
  return Date{*y, *m, *d};
}

Date Date::today() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  return Date{tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday};
}

std::string Date::str() const { return fmt::format("{:04}-{:02}-{:02}", year, month, day); }

// ---------------------------------------------------------------------------

std::optional<Version> Version::parse(std::string_view s) {
  Version v;
  v.raw_ = std::string(text::trim(s));
  std::string lower;
  for (char c : v.raw_) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::string_view rest(lower);
  if (!rest.empty() && rest.front() == 'v') rest.remove_prefix(1);
  if (auto bang = rest.find('!'); bang != std::string_view::npos) rest.remove_prefix(bang + 1);
  if (auto plus = rest.find('+'); plus != std::string_view::npos) rest = rest.substr(0, plus);

  auto read_num = [&](long& out) {
    std::size_t i = 0;
    while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
    if (i == 0) return false;
    out = std::stol(std::string(rest.substr(0, i)));
    rest.remove_prefix(i);
    return true;
  };
  auto skip_sep = [&] {
    if (!rest.empty() && (rest.front() == '.' || rest.front() == '-' || rest.front() == '_'))
      rest.remove_prefix(1);
  };

  long n = 0;
  if (!read_num(n)) return std::nullopt;
  v.release_.push_back(n);
  while (rest.size() > 1 && rest.front() == '.' && std::isdigit(static_cast<unsigned char>(rest[1]))) {
    rest.remove_prefix(1);
    read_num(n);
    v.release_.push_back(n);
  }
  while (!rest.empty()) {
    std::string_view before = rest;
    skip_sep();
    auto take = [&](std::string_view word) {
      if (rest.substr(0, word.size()) != word) return false;
      rest.remove_prefix(word.size());
      return true;
    };
    if (take("rc") || take("preview") || take("pre") || take("c")) {
      v.pre_kind_ = 2;
    } else if (take("alpha") || take("a")) {
      v.pre_kind_ = 0;
    } else if (take("beta") || take("b")) {
      v.pre_kind_ = 1;
    } else if (take("post") || take("rev") || take("r")) {
      skip_sep();
      v.post_ = 0;
      read_num(v.post_);
      continue;
    } else if (take("dev")) {
      skip_sep();
      v.dev_ = 0;
      read_num(v.dev_);
      continue;
    } else if (before.front() == '-' && std::isdigit(static_cast<unsigned char>(rest.empty() ? 'x' : rest.front()))) {
      v.post_ = 0;
      read_num(v.post_);
      continue;
    } else {
      return std::nullopt;
    }
    skip_sep();
    v.pre_num_ = 0;
    read_num(v.pre_num_);
  }
  return v;
}

std::strong_ordering Version::operator<=>(const Version& o) const {
  auto n = std::max(release_.size(), o.release_.size());
  for (std::size_t i = 0; i < n; ++i) {
    long a = i < release_.size() ? release_[i] : 0;
    long b = i < o.release_.size() ? o.release_[i] : 0;
    if (auto c = a <=> b; c != 0) return c;
  }
  // dev-only releases sort before pre-releases, which sort before finals.
  auto pre_key = [](const Version& v) -> std::pair<int, long> {
    if (v.pre_kind_ < 0 && v.post_ < 0 && v.dev_ >= 0) return {-2, 0};
    if (v.pre_kind_ < 0) return {3, 0};
    return {v.pre_kind_, v.pre_num_};
  };
  if (auto c = pre_key(*this) <=> pre_key(o); c != 0) return c;
  if (auto c = post_ <=> o.post_; c != 0) return c;
  long da = dev_ < 0 ? std::numeric_limits<long>::max() : dev_;
  long db = o.dev_ < 0 ? std::numeric_limits<long>::max() : o.dev_;
  return da <=> db;
}

// ---------------------------------------------------------------------------

std::optional<SpecifierSet> SpecifierSet::parse(std::string_view s) {
  SpecifierSet set;
  s = text::trim(s);
  if (s.empty()) return set;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    auto part = text::trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    static const char* const kOps[] = {"===", "==", "!=", "~=", ">=", "<=", ">", "<"};
    std::string op;
    for (const char* k : kOps) {
      if (part.substr(0, std::char_traits<char>::length(k)) == k) {
        op = k;
        break;
      }
    }
    if (op.empty()) return std::nullopt;
    auto ver = text::trim(part.substr(op.size()));
    if (ver.empty()) return std::nullopt;
    set.clauses_.push_back({op, std::string(ver)});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return set;
}

std::optional<std::string> SpecifierSet::exact_pin() const {
  if (clauses_.size() != 1) return std::nullopt;
  const auto& c = clauses_.front();
  if ((c.op == "==" || c.op == "===") && c.version.find('*') == std::string::npos) return c.version;
  return std::nullopt;
}

bool SpecifierSet::contains(const Version& v) const {
  for (const auto& c : clauses_) {
    if (c.op == "===") {
      if (v.str() != c.version) return false;
      continue;
    }
    bool wildcard = c.version.size() > 2 && c.version.compare(c.version.size() - 2, 2, ".*") == 0;
    if (wildcard && (c.op == "==" || c.op == "!=")) {
      auto prefix = Version::parse(c.version.substr(0, c.version.size() - 2));
      if (!prefix) return false;
      const auto& pr = prefix->release();
      bool match = true;
      for (std::size_t i = 0; i < pr.size(); ++i) {
        long have = i < v.release().size() ? v.release()[i] : 0;
        match = match && have == pr[i];
      }
      if ((c.op == "==") != match) return false;
      continue;
    }
    auto target = Version::parse(c.version);
    if (!target) return false;
    auto cmp = v <=> *target;
    if (c.op == "==" && cmp != 0) return false;
    if (c.op == "!=" && cmp == 0) return false;
    if (c.op == ">=" && cmp < 0) return false;
    if (c.op == "<=" && cmp > 0) return false;
    if (c.op == ">" && cmp <= 0) return false;
    if (c.op == "<" && cmp >= 0) return false;
    if (c.op == "~=") {
      if (cmp < 0) return false;
      const auto& tr = target->release();
      if (tr.size() < 2) return false;
      for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
        long have = i < v.release().size() ? v.release()[i] : 0;
        if (have != tr[i]) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

const ReleaseTable& bundled_python_releases() {
  static const ReleaseTable table = [] {
    ReleaseTable t;
    auto j = nlohmann::json::parse(detail::kPythonReleasesJson);
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (auto d = Date::parse(it.value().get<std::string>())) t.emplace(it.key(), *d);
    }
    return t;
  }();
  return table;
}

std::string resolve_python_version(const std::optional<std::string>& declared,
                                   const Date& reference_date, const ReleaseTable& table) {
  if (declared && !declared->empty()) return *declared;
  const std::string* best = nullptr;
  Date best_date;
  for (const auto& [version, date] : table) {
    if (date > reference_date) continue;
    if (!best || date > best_date) {
      best = &version;
      best_date = date;
    }
  }
  if (!best)
    throw Error(ErrorKind::NoVersionAvailable,
                "no Python release on or before " + reference_date.str());
  return *best;
}

// ---------------------------------------------------------------------------

SnapshotReleaseHistory SnapshotReleaseHistory::from_json(std::string_view json_text) {
  SnapshotReleaseHistory h;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("release history snapshot: ") + e.what());
  }
  for (auto pkg = j.begin(); pkg != j.end(); ++pkg) {
    ReleaseTable table;
    for (auto rel = pkg.value().begin(); rel != pkg.value().end(); ++rel) {
      auto d = Date::parse(rel.value().get<std::string>());
      if (!d) throw Error(ErrorKind::Validation, "bad release date for " + pkg.key() + " " + rel.key());
      table.emplace(rel.key(), *d);
    }
    h.packages_[text::normalize_package_name(pkg.key())] = std::move(table);
  }
  return h;
}

std::optional<ReleaseTable> SnapshotReleaseHistory::releases(std::string_view package) {
  auto it = packages_.find(text::normalize_package_name(package));
  if (it == packages_.end()) return std::nullopt;
  return it->second;
}

PypiReleaseHistory::PypiReleaseHistory(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

ReleaseTable PypiReleaseHistory::parse_project_json(std::string_view json_text) {
  ReleaseTable table;
  auto j = nlohmann::json::parse(json_text);
  if (!j.contains("releases")) return table;
  for (auto rel = j["releases"].begin(); rel != j["releases"].end(); ++rel) {
    std::optional<Date> first;
    for (const auto& file : rel.value()) {
      auto key = file.contains("upload_time_iso_8601") ? "upload_time_iso_8601" : "upload_time";
      if (!file.contains(key) || !file[key].is_string()) continue;
      auto d = Date::parse(file[key].get<std::string>());
      if (d && (!first || *d < *first)) first = d;
    }
    if (first) table.emplace(rel.key(), *first);
  }
  return table;
}

std::optional<ReleaseTable> PypiReleaseHistory::releases(std::string_view package) {
  auto name = text::normalize_package_name(package);
  if (auto it = cache_.find(name); it != cache_.end()) return it->second;
  httplib::Client client(base_url_);
  client.set_follow_location(true);
  client.set_connection_timeout(std::chrono::seconds(20));
  client.set_read_timeout(std::chrono::seconds(60));
  auto res = client.Get("/pypi/" + name + "/json");
  if (!res)
    throw Error(ErrorKind::EndpointUnreachable,
                "package index unreachable: " + httplib::to_string(res.error()));
  std::optional<ReleaseTable> out;
  if (res->status == 200) {
    out = parse_project_json(res->body);
  } else if (res->status != 404) {
    throw Error(ErrorKind::EndpointUnreachable,
                fmt::format("package index returned HTTP {} for {}", res->status, name));
  }
  cache_[name] = out;
  return out;
}

std::string resolve_dependency_version(std::string_view package,
                                       const std::optional<std::string>& declared,
                                       const Date& reference_date, ReleaseHistory& registry) {
  std::optional<SpecifierSet> spec;
  if (declared && !text::trim(*declared).empty()) {
    spec = SpecifierSet::parse(*declared);
    if (!spec) throw Error(ErrorKind::Validation, "invalid version specifier: " + *declared);
    if (auto pin = spec->exact_pin()) return *pin;
  }
  auto table = registry.releases(package);
  if (!table) throw Error(ErrorKind::PackageNotFound, "package not found: " + std::string(package));

  struct Candidate {
    Date date;
    Version version;
  };
  std::vector<Candidate> finals, pres;
  for (const auto& [ver, date] : *table) {
    if (date > reference_date) continue;
    auto v = Version::parse(ver);
    if (!v) continue;
    if (spec && !spec->contains(*v)) continue;
    (v->is_prerelease() ? pres : finals).push_back({date, *v});
  }
  auto& pool = finals.empty() ? pres : finals;
  if (pool.empty())
    throw Error(ErrorKind::NoVersionAvailable,
                fmt::format("no release of {} on or before {}", package, reference_date.str()));
  auto best = std::max_element(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.date != b.date) return a.date < b.date;
    return a.version < b.version;
  });
  return best->version.str();
}

}  // namespace libmig::prep
