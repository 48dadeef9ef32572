#include "libmig/discovery/callgrind.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "libmig/common/text.hpp"
#include "libmig/error.hpp"

namespace libmig::discovery {

namespace {

/// One compression table ("(N) name" defines, "(N)" references).
class NameTable {
 public:
  std::string resolve(std::string_view value, std::size_t lineno) {
    value = text::trim(value);
    if (value.empty() || value.front() != '(') return std::string(value);
    auto close = value.find(')');
    if (close == std::string_view::npos) throw ProfileError(lineno, "unterminated name id");
    auto id = value.substr(1, close - 1);
    long n = 0;
    auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), n);
    if (ec != std::errc() || p != id.data() + id.size())
      throw ProfileError(lineno, "bad name id '" + std::string(id) + "'");
    auto rest = text::trim(value.substr(close + 1));
    if (!rest.empty()) {
      names_[n] = std::string(rest);
      return std::string(rest);
    }
    auto it = names_.find(n);
    if (it == names_.end()) throw ProfileError(lineno, "undefined name id (" + std::to_string(n) + ")");
    return it->second;
  }

 private:
  std::map<long, std::string> names_;
};

bool is_position_start(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '*';
}

std::optional<long> parse_number(std::string_view s) {
  long v = 0;
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

class Parser {
 public:
  std::vector<CallRecord> run(std::string_view textin) {
    std::size_t lineno = 0;
    for (const auto& raw : text::split_lines(textin)) {
      ++lineno;
      auto line = text::trim(text::strip_eol(raw));
      if (line.empty() || line.front() == '#') continue;
      handle(line, lineno);
    }
    if (pending_call_) throw ProfileError(pending_call_line_, "calls= without a following cost line");
    return std::move(records_);
  }

 private:
  void handle(std::string_view line, std::size_t lineno) {
    if (is_position_start(line.front())) {
      auto line_pos = read_positions(line, lineno);
      if (pending_call_) {
        pending_call_->line = static_cast<int>(line_pos);
        records_.push_back(std::move(*pending_call_));
        pending_call_.reset();
      }
      return;
    }
    if (pending_call_) throw ProfileError(lineno, "expected cost line after calls=");

    auto eq = line.find('=');
    auto colon = line.find(':');
    if (colon != std::string_view::npos && (eq == std::string_view::npos || colon < eq)) {
      header(line.substr(0, colon), text::trim(line.substr(colon + 1)), lineno);
      return;
    }
    if (eq == std::string_view::npos) throw ProfileError(lineno, "unrecognized line");
    auto key = line.substr(0, eq);
    auto value = line.substr(eq + 1);

    if (key == "fl") {
      file_ = files_.resolve(value, lineno);
      have_file_ = true;
    } else if (key == "fi" || key == "fe") {
      files_.resolve(value, lineno);  // inlined cost, function file unchanged
    } else if (key == "fn") {
      if (!have_file_) throw ProfileError(lineno, "fn= before any fl=");
      function_ = functions_.resolve(value, lineno);
      function_file_ = file_;
      have_function_ = true;
      callee_file_.reset();
      callee_function_.reset();
    } else if (key == "cfl" || key == "cfi") {
      callee_file_ = files_.resolve(value, lineno);
    } else if (key == "cfn") {
      callee_function_ = functions_.resolve(value, lineno);
    } else if (key == "ob" || key == "cob") {
      objects_.resolve(value, lineno);
    } else if (key == "calls") {
      if (!have_function_) throw ProfileError(lineno, "calls= outside a function");
      if (!callee_function_) throw ProfileError(lineno, "calls= without cfn=");
      auto parts = text::split_ws(value);
      if (parts.empty()) throw ProfileError(lineno, "calls= without a count");
      auto count = parse_number(parts.front());
      if (!count) throw ProfileError(lineno, "bad call count '" + parts.front() + "'");
      CallRecord r;
      r.caller_file = function_file_;
      r.caller_function = function_;
      r.callee_file = callee_file_.value_or(function_file_);
      r.callee_function = *callee_function_;
      r.count = *count;
      pending_call_ = std::move(r);
      pending_call_line_ = lineno;
      callee_file_.reset();
      callee_function_.reset();
    }
    // Other `key=` directives (jump, jfi, ...) do not affect the call graph.
  }

  void header(std::string_view key, std::string_view value, std::size_t lineno) {
    if (key == "positions") {
      auto cols = text::split_ws(value);
      if (cols.empty()) throw ProfileError(lineno, "empty positions: header");
      line_column_ = cols.size();
      for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == "line") line_column_ = i;
      if (line_column_ == cols.size()) throw ProfileError(lineno, "positions: without line");
      position_count_ = cols.size();
      last_.assign(position_count_, 0);
    }
    // version/creator/cmd/events/summary/totals and friends are informational.
  }

  long read_positions(std::string_view line, std::size_t lineno) {
    auto parts = text::split_ws(line);
    if (parts.size() < position_count_) throw ProfileError(lineno, "cost line has too few positions");
    for (std::size_t i = 0; i < position_count_; ++i) {
      const auto& p = parts[i];
      long value = 0;
      if (p == "*") {
        value = last_[i];
      } else if (p.front() == '+' || p.front() == '-') {
        auto n = parse_number(std::string_view(p).substr(1));
        if (!n) throw ProfileError(lineno, "bad relative position '" + p + "'");
        value = last_[i] + (p.front() == '+' ? *n : -*n);
      } else {
        auto n = parse_number(p);
        if (!n) throw ProfileError(lineno, "bad position '" + p + "'");
        value = *n;
      }
      last_[i] = value;
    }
    for (std::size_t i = position_count_; i < parts.size(); ++i)
      if (!parse_number(parts[i])) throw ProfileError(lineno, "bad cost '" + parts[i] + "'");
    return last_[line_column_];
  }

  NameTable files_, functions_, objects_;
  std::string file_, function_, function_file_;
  bool have_file_ = false, have_function_ = false;
  std::optional<std::string> callee_file_, callee_function_;
  std::optional<CallRecord> pending_call_;
  std::size_t pending_call_line_ = 0;
  std::size_t position_count_ = 1, line_column_ = 0;
  std::vector<long> last_{0};
  std::vector<CallRecord> records_;
};

}  // namespace

std::vector<CallRecord> parse_callgrind(std::string_view profile_text) {
  return Parser().run(profile_text);
}

std::string write_callgrind(const std::vector<CallRecord>& records, std::string_view creator) {
  std::string out = fmt::format("# callgrind format\nversion: 1\ncreator: {}\npositions: line\nevents: Calls\n\n", creator);
  std::map<std::string, int> files, functions;
  auto name = [](std::map<std::string, int>& table, const std::string& n) {
    auto it = table.find(n);
    if (it != table.end()) return fmt::format("({})", it->second);
    int id = static_cast<int>(table.size()) + 1;
    table.emplace(n, id);
    return fmt::format("({}) {}", id, n);
  };
  const CallRecord* current = nullptr;
  for (const auto& r : records) {
    if (!current || current->caller_file != r.caller_file || current->caller_function != r.caller_function) {
      if (current) out += "\n";
      out += "fl=" + name(files, r.caller_file) + "\n";
      out += "fn=" + name(functions, r.caller_function) + "\n";
      current = &r;
    }
    out += "cfl=" + name(files, r.callee_file) + "\n";
    out += "cfn=" + name(functions, r.callee_function) + "\n";
    out += fmt::format("calls={} 0\n{} {}\n", r.count, r.line, r.count);
  }
  return out;
}

}  // namespace libmig::discovery
