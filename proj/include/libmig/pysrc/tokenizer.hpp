#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace libmig::pysrc {

enum class TokenKind { Name, Number, String, Op, Newline, Nl, Comment, Indent, Dedent, EndMarker };

/// A lexical token. `text` views into the tokenized source, so the source must
/// outlive the token vector.
struct Token {
  TokenKind kind;
  std::string_view text;
  std::size_t offset;  // byte offset of the first character
  int line;            // 1-based line of the first character
  int col;             // 0-based byte column
};

/// Tokenizes Python source the way CPython's tokenizer does at the level this
/// tool needs: string literals (including nested f-string expressions), line
/// continuations, bracket-suppressed newlines and INDENT/DEDENT bookkeeping.
/// Throws Error(SyntaxUnparsable) on unterminated strings, unbalanced brackets,
/// inconsistent dedents and stray characters.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view name);

}  // namespace libmig::pysrc
