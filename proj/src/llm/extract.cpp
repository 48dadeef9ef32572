#include "libmig/llm/extract.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "libmig/common/text.hpp"
#include "libmig/error.hpp"

namespace libmig::llm {

namespace {

struct Fence {
  char ch;
  std::size_t length;
  std::string info;
};

// Up to three spaces of indent, then three or more backticks or tildes.
std::optional<Fence> fence_at(std::string_view line) {
  line = text::strip_eol(line);
  std::size_t i = 0;
  while (i < line.size() && i < 3 && line[i] == ' ') ++i;
  if (i >= line.size() || (line[i] != '`' && line[i] != '~')) return std::nullopt;
  char ch = line[i];
  std::size_t n = 0;
  while (i + n < line.size() && line[i + n] == ch) ++n;
  if (n < 3) return std::nullopt;
  auto info = text::trim(line.substr(i + n));
  if (ch == '`' && info.find('`') != std::string_view::npos) return std::nullopt;
  return Fence{ch, n, std::string(info)};
}

enum class Tag { Python, Untagged, Other };

Tag classify(const std::string& info) {
  if (info.empty()) return Tag::Untagged;
  auto word = info.substr(0, info.find_first_of(" \t{"));
  std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) { return std::tolower(c); });
  if (word == "python" || word == "py" || word == "python3") return Tag::Python;
  return word.empty() ? Tag::Untagged : Tag::Other;
}

}  // namespace

std::string extract_code(std::string_view response) {
  auto lines = text::split_lines(response);
  std::optional<std::string> best[3];

  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto open = fence_at(lines[i]);
    if (!open) continue;
    std::string body;
    bool closed = false;
    std::size_t j = i + 1;
    for (; j < lines.size(); ++j) {
      auto close = fence_at(lines[j]);
      if (close && close->ch == open->ch && close->length >= open->length && close->info.empty()) {
        closed = true;
        break;
      }
      body += lines[j];
    }
    if (closed) {
      if (body.ends_with("\r\n")) body.resize(body.size() - 2);
      else if (body.ends_with('\n')) body.pop_back();
    }
    auto& slot = best[static_cast<int>(classify(open->info))];
    if (!slot || body.size() > slot->size()) slot = std::move(body);
    i = j;
  }
  for (auto& b : best)
    if (b) return *b;
  throw Error(ErrorKind::NoCodeBlock, "response contains no fenced code block");
}

}  // namespace libmig::llm
