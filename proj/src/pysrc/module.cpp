#include "libmig/pysrc/module.hpp"

#include <algorithm>

#include "libmig/common/text.hpp"
#include "libmig/error.hpp"

namespace libmig::pysrc {

std::string ImportBinding::top_level() const {
  if (level > 0) return {};
  return module.substr(0, module.find('.'));
}

namespace {

bool is_op(const Token& t, std::string_view op) { return t.kind == TokenKind::Op && t.text == op; }
bool is_name(const Token& t, std::string_view n) { return t.kind == TokenKind::Name && t.text == n; }
bool is_trivia(const Token& t) {
  return t.kind == TokenKind::Comment || t.kind == TokenKind::Nl || t.kind == TokenKind::Indent ||
         t.kind == TokenKind::Dedent;
}

}  // namespace

class ModuleBuilder {
 public:
  explicit ModuleBuilder(Module& m) : m_(m), toks_(m.tokens_) {}

  void build() {
    index_lines();
    // Logical lines: maximal runs of non-trivia tokens ending in NEWLINE.
    std::size_t i = 0;
    const std::size_t n = toks_.size();
    while (i < n) {
      const Token& t = toks_[i];
      if (t.kind == TokenKind::Indent) {
        ++depth_;
        ++i;
        continue;
      }
      if (t.kind == TokenKind::Dedent) {
        --depth_;
        ++i;
        continue;
      }
      if (is_trivia(t) || t.kind == TokenKind::Newline) {
        ++i;
        continue;
      }
      if (t.kind == TokenKind::EndMarker) break;
      std::vector<std::size_t> line;
      std::size_t j = i;
      for (; j < n && toks_[j].kind != TokenKind::Newline && toks_[j].kind != TokenKind::EndMarker; ++j)
        if (!is_trivia(toks_[j])) line.push_back(j);
      logical_line(line);
      if (!line.empty()) last_line_ = toks_[line.back()].line;
      i = j;
    }
    close_scopes(0, n ? n - 1 : 0);
  }

 private:
  struct Scope {
    bool is_function;
    std::size_t index;  // into functions_ or classes_
    int header_depth;
  };

  void index_lines() {
    const std::string& s = *m_.source_;
    m_.line_offsets_.push_back(0);
    for (std::size_t p = 0; p < s.size(); ++p) {
      if (s[p] == '\n') {
        m_.line_offsets_.push_back(p + 1);
      } else if (s[p] == '\r' && (p + 1 >= s.size() || s[p + 1] != '\n')) {
        m_.line_offsets_.push_back(p + 1);
      }
    }
  }

  void close_scopes(int depth, std::size_t end_token) {
    while (!scopes_.empty() && scopes_.back().header_depth >= depth) {
      auto s = scopes_.back();
      scopes_.pop_back();
      if (s.is_function) {
        m_.functions_[s.index].body_end = end_token;
        m_.functions_[s.index].end_line = last_line_;
      } else {
        m_.classes_[s.index].end_line = last_line_;
      }
    }
  }

  std::string qualify(const std::string& name) const {
    if (scopes_.empty()) return name;
    const auto& s = scopes_.back();
    if (s.is_function) return m_.functions_[s.index].qualname + ".<locals>." + name;
    return m_.classes_[s.index].qualname + "." + name;
  }

  void logical_line(const std::vector<std::size_t>& line) {
    if (line.empty()) return;
    close_scopes(depth_, line.front());
    const Token& first = toks_[line.front()];

    if (is_op(first, "@")) {
      auto begin = first.offset + 1;
      const Token& last = toks_[line.back()];
      auto end = last.offset + last.text.size();
      pending_.push_back(Decorator{first.offset, first.line,
                                   std::string(text::trim(m_.source_->substr(begin, end - begin)))});
      return;
    }

    std::size_t k = 0;
    bool is_async = false;
    if (is_name(first, "async") && line.size() > 1 && is_name(toks_[line[1]], "def")) {
      is_async = true;
      k = 1;
    }
    const Token& kw = toks_[line[k]];
    if ((is_name(kw, "def") || is_name(kw, "class")) && k + 1 < line.size() &&
        toks_[line[k + 1]].kind == TokenKind::Name) {
      std::string name(toks_[line[k + 1]].text);
      std::size_t colon = header_colon(line, k + 2);
      if (is_name(kw, "def")) {
        FunctionDef f;
        f.name = name;
        f.qualname = qualify(name);
        f.is_async = is_async;
        f.line = kw.line;
        f.header_offset = first.offset;
        f.def_offset = kw.offset;
        f.line_offset = m_.line_offset(first.line);
        f.indent = m_.source_->substr(f.line_offset, first.offset - f.line_offset);
        f.decorators = std::move(pending_);
        f.body_begin = colon + 1;
        f.in_class = !scopes_.empty() && !scopes_.back().is_function;
        m_.functions_.push_back(std::move(f));
        scopes_.push_back({true, m_.functions_.size() - 1, depth_});
      } else {
        ClassDef c;
        c.name = name;
        c.qualname = qualify(name);
        c.line = kw.line;
        m_.classes_.push_back(std::move(c));
        scopes_.push_back({false, m_.classes_.size() - 1, depth_});
      }
      pending_.clear();
      scan_imports(line, position_in(line, colon) + 1);
      return;
    }
    pending_.clear();
    scan_imports(line, 0);
  }

  std::size_t position_in(const std::vector<std::size_t>& line, std::size_t token) const {
    auto it = std::find(line.begin(), line.end(), token);
    return static_cast<std::size_t>(it - line.begin());
  }

  // Token index of the ':' that ends a def/class header (bracket depth 0).
  std::size_t header_colon(const std::vector<std::size_t>& line, std::size_t from) const {
    int depth = 0;
    for (std::size_t p = from; p < line.size(); ++p) {
      const Token& t = toks_[line[p]];
      if (t.kind != TokenKind::Op) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      else if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      else if (t.text == ":" && depth == 0) return line[p];
    }
    return line.back();
  }

  // Finds import statements at statement-start positions of the logical line,
  // beginning at position `from` within `line`.
  void scan_imports(const std::vector<std::size_t>& line, std::size_t from) {
    int depth = 0;
    for (std::size_t p = from; p < line.size(); ++p) {
      const Token& t = toks_[line[p]];
      bool stmt_start = p == from;
      if (p > from) {
        const Token& prev = toks_[line[p - 1]];
        stmt_start = is_op(prev, ";") || (is_op(prev, ":") && depth == 0);
      }
      if (t.kind == TokenKind::Op) {
        if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
        else if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      }
      if (!stmt_start) continue;
      if (is_name(t, "import"))
        p = parse_import(line, p + 1);
      else if (is_name(t, "from"))
        p = parse_from(line, p + 1);
    }
  }

  // Reads a dotted name starting at position p. Returns the end position.
  std::size_t dotted(const std::vector<std::size_t>& line, std::size_t p, std::string& out) const {
    while (p < line.size() && toks_[line[p]].kind == TokenKind::Name && !is_keyword(toks_[line[p]].text)) {
      out += toks_[line[p]].text;
      if (p + 1 < line.size() && is_op(toks_[line[p + 1]], ".")) {
        out += '.';
        p += 2;
      } else {
        return p + 1;
      }
    }
    return p;
  }

  std::size_t parse_import(const std::vector<std::size_t>& line, std::size_t p) {
    int lineno = toks_[line[p - 1]].line;
    while (p < line.size()) {
      ImportBinding b;
      b.line = lineno;
      p = dotted(line, p, b.module);
      if (b.module.empty()) return p;
      b.bound = b.module.substr(0, b.module.find('.'));
      if (p + 1 < line.size() && is_name(toks_[line[p]], "as")) {
        b.bound = std::string(toks_[line[p + 1]].text);
        p += 2;
      }
      m_.imports_.push_back(std::move(b));
      if (p < line.size() && is_op(toks_[line[p]], ",")) {
        ++p;
        continue;
      }
      break;
    }
    return p > 0 ? p - 1 : p;
  }

  std::size_t parse_from(const std::vector<std::size_t>& line, std::size_t p) {
    int lineno = toks_[line[p - 1]].line;
    int level = 0;
    while (p < line.size() && (is_op(toks_[line[p]], ".") || is_op(toks_[line[p]], "..."))) {
      level += static_cast<int>(toks_[line[p]].text.size());
      ++p;
    }
    std::string module;
    p = dotted(line, p, module);
    if (p >= line.size() || !is_name(toks_[line[p]], "import")) return p;
    ++p;
    bool paren = p < line.size() && is_op(toks_[line[p]], "(");
    if (paren) ++p;
    while (p < line.size()) {
      const Token& t = toks_[line[p]];
      if (is_op(t, ")")) break;
      if (is_op(t, "*") || t.kind == TokenKind::Name) {
        ImportBinding b;
        b.module = module;
        b.member = std::string(t.text);
        b.bound = b.member;
        b.level = level;
        b.line = lineno;
        b.from_import = true;
        ++p;
        if (p + 1 < line.size() && is_name(toks_[line[p]], "as")) {
          b.bound = std::string(toks_[line[p + 1]].text);
          p += 2;
        }
        m_.imports_.push_back(std::move(b));
        if (p < line.size() && is_op(toks_[line[p]], ",")) {
          ++p;
          continue;
        }
      }
      break;
    }
    return p > 0 ? p - 1 : p;
  }

  Module& m_;
  const std::vector<Token>& toks_;
  int depth_ = 0;
  int last_line_ = 0;
  std::vector<Scope> scopes_;
  std::vector<Decorator> pending_;
};

Module Module::parse(std::string source) {
  Module m;
  m.source_ = std::make_shared<const std::string>(std::move(source));
  m.tokens_ = tokenize(*m.source_);
  ModuleBuilder(m).build();
  return m;
}

const FunctionDef* Module::find_function(std::string_view qualname) const {
  for (const auto& f : functions_)
    if (f.qualname == qualname) return &f;
  return nullptr;
}

const FunctionDef* Module::resolve_function(std::string_view name) const {
  if (const auto* f = find_function(name)) return f;
  auto dot = name.rfind('.');
  std::string_view terminal = dot == std::string_view::npos ? name : name.substr(dot + 1);
  const FunctionDef* found = nullptr;
  for (const auto& f : functions_) {
    if (f.name != terminal) continue;
    if (found) return nullptr;
    found = &f;
  }
  return found;
}

const FunctionDef* Module::enclosing_function(std::size_t token_index) const {
  const FunctionDef* best = nullptr;
  for (const auto& f : functions_) {
    if (token_index >= f.body_begin && token_index < f.body_end) {
      if (!best || f.body_begin > best->body_begin) best = &f;
    }
  }
  return best;
}

const FunctionDef* Module::function_at_line(int line) const {
  const FunctionDef* best = nullptr;
  for (const auto& f : functions_) {
    if (line >= f.line && line <= f.end_line) {
      if (!best || f.line > best->line) best = &f;
    }
  }
  return best;
}

std::size_t Module::line_offset(int line) const {
  if (line < 1) return 0;
  auto idx = static_cast<std::size_t>(line - 1);
  if (idx >= line_offsets_.size()) return source_->size();
  return line_offsets_[idx];
}

std::string_view Module::newline() const { return text::detect_newline(*source_); }

std::size_t Module::matching_open(std::size_t close_index) const {
  int depth = 0;
  for (std::size_t i = close_index + 1; i-- > 0;) {
    const Token& t = tokens_[i];
    if (t.kind != TokenKind::Op) continue;
    if (t.text == ")" || t.text == "]" || t.text == "}") ++depth;
    else if (t.text == "(" || t.text == "[" || t.text == "{") {
      if (--depth == 0) return i;
    }
  }
  return close_index;
}

std::size_t Module::primary_start(std::size_t name_index) const {
  auto callable_name = [&](const Token& t) {
    return t.kind == TokenKind::Name && (!is_keyword(t.text) || t.text == "None" ||
                                         t.text == "True" || t.text == "False");
  };
  std::size_t cur = name_index;
  while (cur >= 2 && is_op(tokens_[cur - 1], ".")) {
    std::size_t j = cur - 2;
    const Token& t = tokens_[j];
    if (callable_name(t) || t.kind == TokenKind::Number || t.kind == TokenKind::String) {
      cur = j;
      continue;
    }
    if (is_op(t, ")") || is_op(t, "]") || is_op(t, "}")) {
      cur = matching_open(j);
      // Walk trailers: `f(x)(y)[z].name`
      while (cur >= 1) {
        const Token& before = tokens_[cur - 1];
        if (is_op(tokens_[cur], "{")) break;
        if (callable_name(before)) {
          cur = cur - 1;
          break;
        }
        if (is_op(before, ")") || is_op(before, "]")) {
          cur = matching_open(cur - 1);
          continue;
        }
        break;
      }
      continue;
    }
    break;
  }
  return cur;
}

std::vector<Call> Module::calls_named(std::string_view name) const {
  std::vector<Call> out;
  for (std::size_t i = 0; i + 1 < tokens_.size(); ++i) {
    const Token& t = tokens_[i];
    if (t.kind != TokenKind::Name || t.text != name) continue;
    if (!is_op(tokens_[i + 1], "(")) continue;
    if (i > 0 && (is_name(tokens_[i - 1], "def") || is_name(tokens_[i - 1], "class"))) continue;
    std::size_t start = primary_start(i);
    bool awaited = start > 0 && is_name(tokens_[start - 1], "await");
    out.push_back(Call{i, start, t.line, awaited, enclosing_function(i)});
  }
  return out;
}

std::string apply_insertions(std::string_view source, std::vector<Insertion> insertions) {
  std::stable_sort(insertions.begin(), insertions.end(),
                   [](const Insertion& a, const Insertion& b) { return a.offset < b.offset; });
  std::string out;
  out.reserve(source.size() + insertions.size() * 16);
  std::size_t pos = 0;
  for (const auto& ins : insertions) {
    auto at = std::min(ins.offset, source.size());
    out.append(source.substr(pos, at - pos));
    out += ins.text;
    pos = at;
  }
  out.append(source.substr(pos));
  return out;
}

}  // namespace libmig::pysrc
