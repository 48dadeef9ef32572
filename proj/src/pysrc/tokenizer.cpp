#include "libmig/pysrc/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "libmig/error.hpp"

namespace libmig::pysrc {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async",
    "await", "break",  "class",   "continue", "def",    "del",    "elif",
    "else",  "except", "finally", "for",      "from",   "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",  "or",
    "pass",  "raise",  "return",  "try",      "while",  "with",   "yield"};

constexpr std::array<std::string_view, 4> kOps3 = {"**=", "//=", ">>=", "<<="};
constexpr std::array<std::string_view, 3> kEllipsisArrow = {"...", "->", ":="};
constexpr std::array<std::string_view, 18> kOps2 = {"==", "!=", "<=", ">=", "**", "//",
                                                    "<<", ">>", "+=", "-=", "*=", "/=",
                                                    "%=", "&=", "|=", "^=", "@=", "<>"};
constexpr std::string_view kOps1 = "()[]{}:,;.+-*/%&|^~<>=@";

bool ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}
bool ident_char(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool valid_string_prefix(std::string_view p) {
  std::string lower;
  for (char c : p) lower += static_cast<char>(c | 0x20);
  static const char* const kPrefixes[] = {"r", "u", "b", "f", "br", "rb", "fr", "rf"};
  return std::any_of(std::begin(kPrefixes), std::end(kPrefixes),
                     [&](const char* k) { return lower == k; });
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = line_start_ = 3;
    while (pos_ < src_.size()) {
      if (at_line_start_ && parens_.empty()) {
        handle_indentation();
        if (pos_ >= src_.size()) break;
      }
      step();
    }
    if (!parens_.empty()) fail(parens_.back().line, "unclosed bracket");
    if (line_has_content_) emit(TokenKind::Newline, pos_, pos_);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, pos_, pos_);
    }
    emit(TokenKind::EndMarker, pos_, pos_);
    return std::move(tokens_);
  }

 private:
  struct Bracket {
    char ch;
    int line;
  };

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw Error(ErrorKind::SyntaxUnparsable, "line " + std::to_string(line) + ": " + what);
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void emit(TokenKind kind, std::size_t begin, std::size_t end) {
    emit_at(kind, begin, end, line_, static_cast<int>(begin - line_start_));
  }

  void emit_at(TokenKind kind, std::size_t begin, std::size_t end, int line, int col) {
    tokens_.push_back(Token{kind, src_.substr(begin, end - begin), begin, line, col});
    if (kind != TokenKind::Comment && kind != TokenKind::Nl && kind != TokenKind::Newline &&
        kind != TokenKind::Indent && kind != TokenKind::Dedent)
      line_has_content_ = true;
  }

  // Consumes one line break at pos_ (\n, \r\n or lone \r) and advances the line counter.
  void consume_newline() {
    if (peek() == '\r' && peek(1) == '\n')
      pos_ += 2;
    else
      pos_ += 1;
    ++line_;
    line_start_ = pos_;
  }

  void handle_indentation() {
    int col = 0;
    std::size_t p = pos_;
    while (p < src_.size()) {
      char c = src_[p];
      if (c == ' ')
        ++col;
      else if (c == '\t')
        col = (col / 8 + 1) * 8;
      else if (c == '\f')
        col = 0;
      else
        break;
      ++p;
    }
    char c = p < src_.size() ? src_[p] : '\0';
    at_line_start_ = false;
    if (c == '#' || c == '\n' || c == '\r' || c == '\0') {
      pos_ = p;
      return;
    }
    if (col > indents_.back()) {
      indents_.push_back(col);
      emit(TokenKind::Indent, pos_, p);
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::Dedent, p, p);
      }
      if (col != indents_.back()) fail(line_, "unindent does not match any outer indentation level");
    }
    pos_ = p;
  }

  void step() {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\f') {
      ++pos_;
      return;
    }
    if (c == '#') {
      auto end = src_.find_first_of("\r\n", pos_);
      if (end == std::string_view::npos) end = src_.size();
      emit(TokenKind::Comment, pos_, end);
      pos_ = end;
      return;
    }
    if (c == '\\') {
      char n = peek(1);
      if (n == '\n' || n == '\r') {
        ++pos_;
        consume_newline();
        return;
      }
      if (n == '\0') fail(line_, "unexpected end of file after line continuation");
      fail(line_, "unexpected character after line continuation");
    }
    if (c == '\n' || c == '\r') {
      std::size_t begin = pos_;
      bool logical = parens_.empty() && line_has_content_;
      int line = line_;
      int col = static_cast<int>(begin - line_start_);
      consume_newline();
      emit_at(logical ? TokenKind::Newline : TokenKind::Nl, begin, pos_, line, col);
      if (logical) line_has_content_ = false;
      at_line_start_ = true;
      return;
    }
    if (c == '"' || c == '\'') {
      scan_string(pos_, pos_);
      return;
    }
    if (ident_start(static_cast<unsigned char>(c))) {
      std::size_t begin = pos_;
      while (pos_ < src_.size() && ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      auto word = src_.substr(begin, pos_ - begin);
      char q = peek();
      if ((q == '"' || q == '\'') && valid_string_prefix(word)) {
        scan_string(begin, pos_);
        return;
      }
      emit(TokenKind::Name, begin, pos_);
      return;
    }
    if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
      scan_number();
      return;
    }
    scan_operator();
  }

  void scan_number() {
    std::size_t begin = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (ident_char(static_cast<unsigned char>(c)) || c == '.') {
        ++pos_;
        if ((c == 'e' || c == 'E') && (peek() == '+' || peek() == '-') && !is_hex(begin)) ++pos_;
        continue;
      }
      break;
    }
    emit(TokenKind::Number, begin, pos_);
  }

  bool is_hex(std::size_t begin) const {
    return pos_ - begin >= 2 && src_[begin] == '0' && (src_[begin + 1] == 'x' || src_[begin + 1] == 'X');
  }

  // begin: start of the token including prefix; quote_pos: first quote char.
  void scan_string(std::size_t begin, std::size_t quote_pos) {
    int line = line_;
    int col = static_cast<int>(begin - line_start_);
    std::string_view prefix = src_.substr(begin, quote_pos - begin);
    bool fstring = prefix.find_first_of("fF") != std::string_view::npos;
    pos_ = quote_pos;
    scan_string_body(fstring, line);
    emit_at(TokenKind::String, begin, pos_, line, col);
  }

  void scan_string_body(bool fstring, int start_line) {
    char q = peek();
    bool triple = peek(1) == q && peek(2) == q;
    pos_ += triple ? 3 : 1;
    while (true) {
      if (pos_ >= src_.size()) fail(start_line, "unterminated string literal");
      char c = src_[pos_];
      if (c == '\\') {
        ++pos_;
        if (pos_ >= src_.size()) fail(start_line, "unterminated string literal");
        if (src_[pos_] == '\n' || src_[pos_] == '\r')
          consume_newline();
        else
          ++pos_;
        continue;
      }
      if (c == '\n' || c == '\r') {
        if (!triple) fail(start_line, "unterminated string literal");
        consume_newline();
        continue;
      }
      if (c == q) {
        if (!triple) {
          ++pos_;
          return;
        }
        if (peek(1) == q && peek(2) == q) {
          pos_ += 3;
          return;
        }
        ++pos_;
        continue;
      }
      if (fstring && c == '{') {
        if (peek(1) == '{') {
          pos_ += 2;
          continue;
        }
        scan_fstring_expression(start_line);
        continue;
      }
      ++pos_;
    }
  }

  // pos_ is on the opening '{' of a replacement field.
  void scan_fstring_expression(int start_line) {
    int depth = 0;
    while (true) {
      if (pos_ >= src_.size()) fail(start_line, "unterminated f-string expression");
      char c = src_[pos_];
      if (c == '{' || c == '(' || c == '[') {
        ++depth;
        ++pos_;
      } else if (c == '}' || c == ')' || c == ']') {
        --depth;
        ++pos_;
        if (depth == 0) return;
      } else if (c == '"' || c == '\'') {
        std::size_t p = pos_;
        bool nested_f = p > 0 && (src_[p - 1] == 'f' || src_[p - 1] == 'F');
        scan_string_body(nested_f, start_line);
      } else if (c == '\n' || c == '\r') {
        consume_newline();
      } else {
        ++pos_;
      }
    }
  }

  void scan_operator() {
    auto rest = src_.substr(pos_);
    auto try_ops = [&](auto const& ops) -> std::size_t {
      for (auto op : ops)
        if (rest.substr(0, op.size()) == op) return op.size();
      return 0;
    };
    std::size_t len = try_ops(kOps3);
    if (!len) len = try_ops(kEllipsisArrow);
    if (!len) len = try_ops(kOps2);
    if (!len && kOps1.find(rest[0]) != std::string_view::npos) len = 1;
    if (!len) fail(line_, std::string("unexpected character '") + rest[0] + "'");

    if (len == 1) {
      char c = rest[0];
      if (c == '(' || c == '[' || c == '{') {
        parens_.push_back({c, line_});
      } else if (c == ')' || c == ']' || c == '}') {
        char open = c == ')' ? '(' : c == ']' ? '[' : '{';
        if (parens_.empty() || parens_.back().ch != open) fail(line_, std::string("unmatched '") + c + "'");
        parens_.pop_back();
      }
    }
    emit(TokenKind::Op, pos_, pos_ + len);
    pos_ += len;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
  bool at_line_start_ = true;
  bool line_has_content_ = false;
  std::vector<int> indents_{0};
  std::vector<Bracket> parens_;
  std::vector<Token> tokens_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Tokenizer(source).run(); }

bool is_keyword(std::string_view name) {
  return std::find(kKeywords.begin(), kKeywords.end(), name) != kKeywords.end();
}

}  // namespace libmig::pysrc
