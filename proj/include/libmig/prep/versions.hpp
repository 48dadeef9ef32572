#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace libmig::prep {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  /// Accepts "YYYY-MM-DD" optionally followed by a time part ("T...").
  static std::optional<Date> parse(std::string_view s);
  static Date today();
  std::string str() const;

  auto operator<=>(const Date&) const = default;
};

/// Release ordering for PEP 440 style versions: numeric release segments plus
/// pre/post/dev markers. Local labels are ignored.
class Version {
 public:
  static std::optional<Version> parse(std::string_view s);

  bool is_prerelease() const { return pre_kind_ >= 0 || dev_ >= 0; }
  const std::vector<long>& release() const { return release_; }
  const std::string& str() const { return raw_; }

  std::strong_ordering operator<=>(const Version& other) const;
  bool operator==(const Version& other) const { return (*this <=> other) == 0; }

 private:
  std::string raw_;
  std::vector<long> release_;
  int pre_kind_ = -1;  // 0=a 1=b 2=rc
  long pre_num_ = 0;
  long post_ = -1;
  long dev_ = -1;
};

/// A comma-separated PEP 440 specifier set ("==1.2", ">=1,<2", "~=1.4", "==1.*").
class SpecifierSet {
 public:
  static std::optional<SpecifierSet> parse(std::string_view s);
  bool contains(const Version& v) const;
  bool empty() const { return clauses_.empty(); }
  /// The version of a lone `==X` / `===X` clause without wildcards.
  std::optional<std::string> exact_pin() const;

 private:
  struct Clause {
    std::string op;
    std::string version;
  };
  std::vector<Clause> clauses_;
};

using ReleaseTable = std::map<std::string, Date>;

/// Release dates of CPython minor versions, bundled with the tool.
const ReleaseTable& bundled_python_releases();

/// The declared version when present, else the version released most recently
/// on or before `reference_date`. Throws Error(NoVersionAvailable).
std::string resolve_python_version(const std::optional<std::string>& declared,
                                   const Date& reference_date, const ReleaseTable& table);

/// Release history of registry packages.
class ReleaseHistory {
 public:
  virtual ~ReleaseHistory() = default;
  /// version -> first upload date; nullopt when the package does not exist.
  virtual std::optional<ReleaseTable> releases(std::string_view package) = 0;
};

/// Offline snapshot: {"package": {"1.0": "2019-01-01", ...}, ...}.
class SnapshotReleaseHistory : public ReleaseHistory {
 public:
  static SnapshotReleaseHistory from_json(std::string_view json_text);
  std::optional<ReleaseTable> releases(std::string_view package) override;

 private:
  std::map<std::string, ReleaseTable> packages_;
};

/// Live lookups against a PyPI-compatible JSON API (`<base>/pypi/<name>/json`).
class PypiReleaseHistory : public ReleaseHistory {
 public:
  explicit PypiReleaseHistory(std::string base_url = "https://pypi.org");
  std::optional<ReleaseTable> releases(std::string_view package) override;

  /// Parses a PyPI project JSON document into a release table.
  static ReleaseTable parse_project_json(std::string_view json_text);

 private:
  std::string base_url_;
  std::map<std::string, std::optional<ReleaseTable>> cache_;
};

/// An exact `==` pin wins; otherwise the most recently released version on or
/// before `reference_date` that satisfies the declared specifier. Pre-releases
/// are only considered when nothing else qualifies.
/// Throws Error(PackageNotFound) or Error(NoVersionAvailable).
std::string resolve_dependency_version(std::string_view package,
                                       const std::optional<std::string>& declared,
                                       const Date& reference_date, ReleaseHistory& registry);

}  // namespace libmig::prep
