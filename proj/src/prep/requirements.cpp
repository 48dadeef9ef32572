#include "libmig/prep/requirements.hpp"

#include <cctype>

#include "libmig/common/text.hpp"

namespace libmig::prep {

std::optional<std::string> Requirement::exact_pin() const {
  if (passthrough || specifier.empty()) return std::nullopt;
  auto spec = SpecifierSet::parse(specifier);
  return spec ? spec->exact_pin() : std::nullopt;
}

namespace {

std::string strip_comment(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]))))
      return std::string(line.substr(0, i));
  }
  return std::string(line);
}

bool looks_like_path_or_url(std::string_view s) {
  return s.find("://") != std::string_view::npos || s.rfind("git+", 0) == 0 ||
         s.rfind("./", 0) == 0 || s.rfind("../", 0) == 0 || s.rfind("/", 0) == 0 ||
         s.rfind("file:", 0) == 0 || s.ends_with(".whl") || s.ends_with(".tar.gz") ||
         s.ends_with(".zip");
}

Requirement parse_line(std::string_view line) {
  Requirement r;
  r.raw = std::string(line);
  if (line.front() == '-' || looks_like_path_or_url(line)) {
    r.passthrough = true;
    return r;
  }
  std::size_t i = 0;
  while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '-' ||
                             line[i] == '_' || line[i] == '.'))
    ++i;
  r.name = std::string(line.substr(0, i));
  std::string_view rest = text::trim(line.substr(i));
  if (!rest.empty() && rest.front() == '[') {
    auto close = rest.find(']');
    if (close != std::string_view::npos) {
      r.extras = std::string(rest.substr(0, close + 1));
      rest = text::trim(rest.substr(close + 1));
    }
  }
  if (auto semi = rest.find(';'); semi != std::string_view::npos) {
    r.marker = std::string(text::trim(rest.substr(semi + 1)));
    rest = text::trim(rest.substr(0, semi));
  }
  if (!rest.empty() && rest.front() == '@') {
    // PEP 508 direct reference.
    r.passthrough = true;
    return r;
  }
  if (!rest.empty() && rest.front() == '(' && rest.back() == ')')
    rest = text::trim(rest.substr(1, rest.size() - 2));
  r.specifier = std::string(rest);
  if (r.name.empty()) r.passthrough = true;
  return r;
}

}  // namespace

std::vector<Requirement> parse_requirements(std::string_view content) {
  std::vector<Requirement> out;
  std::string pending;
  for (const auto& raw : text::split_lines(content)) {
    std::string line(text::strip_eol(raw));
    if (!line.empty() && line.back() == '\\') {
      pending += line.substr(0, line.size() - 1);
      continue;
    }
    pending += line;
    auto stripped = std::string(text::trim(strip_comment(pending)));
    pending.clear();
    if (stripped.empty()) continue;
    out.push_back(parse_line(stripped));
  }
  auto last = std::string(text::trim(strip_comment(pending)));
  if (!last.empty()) out.push_back(parse_line(last));
  return out;
}

std::string pin_requirements(const std::vector<Requirement>& reqs, const Date& reference_date,
                             ReleaseHistory& registry) {
  std::string out;
  for (const auto& r : reqs) {
    if (r.passthrough || r.exact_pin()) {
      out += r.raw + "\n";
      continue;
    }
    std::optional<std::string> declared;
    if (!r.specifier.empty()) declared = r.specifier;
    auto version = resolve_dependency_version(r.name, declared, reference_date, registry);
    out += r.name + r.extras + "==" + version;
    if (!r.marker.empty()) out += "; " + r.marker;
    out += "\n";
  }
  return out;
}

}  // namespace libmig::prep
