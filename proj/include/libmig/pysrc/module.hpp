#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "libmig/pysrc/tokenizer.hpp"

namespace libmig::pysrc {

struct Decorator {
  std::size_t offset;  // offset of '@'
  int line;
  std::string expression;  // text after '@', trimmed
};

struct FunctionDef {
  std::string name;
  /// Python __qualname__ convention: "Cls.meth", "outer.<locals>.inner".
  std::string qualname;
  bool is_async = false;
  int line = 0;      // line of the `def` keyword
  int end_line = 0;  // last line of the body
  std::size_t header_offset = 0;  // first token of the header (`async` or `def`)
  std::size_t def_offset = 0;     // the `def` keyword
  std::size_t line_offset = 0;    // start of the physical line holding the header
  std::string indent;             // whitespace before the header
  std::vector<Decorator> decorators;
  std::size_t body_begin = 0;  // token index just past the header colon
  std::size_t body_end = 0;    // token index one past the body
  bool in_class = false;       // directly inside a class body
};

struct ClassDef {
  std::string name;
  std::string qualname;
  int line = 0;
  int end_line = 0;
};

/// One name bound by an import statement.
struct ImportBinding {
  std::string module;  // dotted module; for `from m import x` this is "m"
  std::string member;  // "x" for from-imports, empty for plain imports
  std::string bound;   // name bound in the importing namespace
  int level = 0;       // leading dots of a relative from-import
  int line = 0;
  bool from_import = false;

  /// First dotted segment of the module; empty for relative imports.
  std::string top_level() const;
};

/// A call `...name(` located in the token stream.
struct Call {
  std::size_t name_token;   // token index of the called name
  std::size_t start_token;  // first token of the whole primary (`a.b().name`)
  int line;
  bool awaited;
  const FunctionDef* enclosing;  // innermost function body, null at module level
};

/// Concrete-syntax view of a Python module: the original text, its tokens and
/// the definitions/imports recovered from them. Edits are expressed against
/// byte offsets of the original text so untouched bytes survive verbatim.
class Module {
 public:
  /// Throws Error(SyntaxUnparsable).
  static Module parse(std::string source);

  const std::string& source() const { return *source_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const std::vector<FunctionDef>& functions() const { return functions_; }
  const std::vector<ClassDef>& classes() const { return classes_; }
  const std::vector<ImportBinding>& imports() const { return imports_; }

  const FunctionDef* find_function(std::string_view qualname) const;

  /// Resolves a profiler-style function name: exact qualname first, then a
  /// unique definition whose terminal name matches.
  const FunctionDef* resolve_function(std::string_view name) const;

  /// Innermost function whose body contains token `index`.
  const FunctionDef* enclosing_function(std::size_t token_index) const;

  /// Innermost function whose body spans `line`.
  const FunctionDef* function_at_line(int line) const;

  /// Calls whose callee's terminal name is `name`.
  std::vector<Call> calls_named(std::string_view name) const;

  /// Offset where the physical line `line` (1-based) starts.
  std::size_t line_offset(int line) const;

  std::string_view newline() const;

 private:
  std::shared_ptr<const std::string> source_;
  std::vector<Token> tokens_;
  std::vector<FunctionDef> functions_;
  std::vector<ClassDef> classes_;
  std::vector<ImportBinding> imports_;
  std::vector<std::size_t> line_offsets_;

  std::size_t primary_start(std::size_t name_index) const;
  std::size_t matching_open(std::size_t close_index) const;

  friend class ModuleBuilder;
};

/// Splices `text` into `source` at each offset. Insert-only: existing bytes are
/// never touched. Edits at the same offset keep their given order.
struct Insertion {
  std::size_t offset;
  std::string text;
};
std::string apply_insertions(std::string_view source, std::vector<Insertion> insertions);

}  // namespace libmig::pysrc
