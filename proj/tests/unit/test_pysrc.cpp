#include <doctest.h>

#include "libmig/error.hpp"
#include "libmig/pysrc/module.hpp"
#include "libmig/pysrc/tokenizer.hpp"

using namespace libmig;
using namespace libmig::pysrc;

namespace {

std::vector<TokenKind> kinds(std::string_view src) {
  std::vector<TokenKind> out;
  for (const auto& t : tokenize(src)) out.push_back(t.kind);
  return out;
}

}  // namespace

TEST_CASE("tokenizer emits indent bookkeeping") {
  using K = TokenKind;
  auto k = kinds("def f():\n    return 1\n");
  CHECK(k == std::vector<K>{K::Name, K::Name, K::Op, K::Op, K::Op, K::Newline, K::Indent, K::Name, K::Number,
                            K::Newline, K::Dedent, K::EndMarker});
}

TEST_CASE("tokens view the source and carry positions") {
  std::string src = "x = 'a' + f\"{y!r:>{w}}\"  # c\n";
  auto toks = tokenize(src);
  for (const auto& t : toks)
    if (t.kind != TokenKind::Dedent && t.kind != TokenKind::EndMarker && t.kind != TokenKind::Indent)
      CHECK(src.substr(t.offset, t.text.size()) == t.text);
  CHECK(toks[2].text == "'a'");
  CHECK(toks[4].text == "f\"{y!r:>{w}}\"");
  CHECK(toks[5].kind == TokenKind::Comment);
}

TEST_CASE("newlines inside brackets are NL, continuations vanish") {
  auto toks = tokenize("a = (1,\n     2)\nb = 1 + \\\n    2\n");
  int newlines = 0, nls = 0;
  for (const auto& t : toks) {
    newlines += t.kind == TokenKind::Newline;
    nls += t.kind == TokenKind::Nl;
  }
  CHECK(newlines == 2);
  CHECK(nls == 1);
}

TEST_CASE("triple quoted and prefixed strings") {
  auto toks = tokenize("s = rb'''x\n'y'\n'''\nt = 1\n");
  CHECK(toks[2].kind == TokenKind::String);
  CHECK(toks[2].line == 1);
  CHECK(toks[4].text == "t");
  CHECK(toks[4].line == 4);
}

TEST_CASE("tokenizer rejects broken input") {
  CHECK_THROWS_AS(tokenize("s = 'abc\n"), Error);
  CHECK_THROWS_AS(tokenize("x = (1,\n"), Error);
  CHECK_THROWS_AS(tokenize("x = 1)\n"), Error);
  CHECK_THROWS_AS(tokenize("if x:\n        a\n    b\n"), Error);
  CHECK_THROWS_AS(tokenize("x = '''open\n"), Error);
  CHECK(is_keyword("async"));
  CHECK_FALSE(is_keyword("print"));
}

TEST_CASE("module recovers qualnames the way Python does") {
  auto m = Module::parse(
      "class A:\n"
      "    def m(self):\n"
      "        def inner():\n"
      "            pass\n"
      "        return inner\n"
      "\n"
      "    class B:\n"
      "        async def n(self): ...\n"
      "\n"
      "@deco\n"
      "def top():\n"
      "    lambda: 0\n");
  std::vector<std::string> q;
  for (const auto& f : m.functions()) q.push_back(f.qualname);
  CHECK(q == std::vector<std::string>{"A.m", "A.m.<locals>.inner", "A.B.n", "top"});
  auto* n = m.find_function("A.B.n");
  REQUIRE(n);
  CHECK(n->is_async);
  CHECK(n->in_class);
  auto* top = m.find_function("top");
  REQUIRE(top);
  CHECK(top->line == 11);
  REQUIRE(top->decorators.size() == 1);
  CHECK(top->decorators[0].expression == "deco");
  CHECK(top->decorators[0].line == 10);
  CHECK(m.classes().size() == 2);
  CHECK(m.resolve_function("inner") == m.find_function("A.m.<locals>.inner"));
  CHECK(m.resolve_function("A.m") == m.find_function("A.m"));
  CHECK(m.function_at_line(4) == m.find_function("A.m.<locals>.inner"));
  CHECK(m.function_at_line(5) == m.find_function("A.m"));
  CHECK(m.function_at_line(6) == nullptr);
}

TEST_CASE("ambiguous terminal names do not resolve") {
  auto m = Module::parse("class A:\n    def f(self): pass\nclass B:\n    def f(self): pass\n");
  CHECK(m.resolve_function("f") == nullptr);
}

TEST_CASE("imports of every shape") {
  auto m = Module::parse(
      "import os, yaml.loader as yl\n"
      "from . import sibling\n"
      "from ..pkg.mod import (a,\n    b as c)\n"
      "def f():\n"
      "    import json\n");
  const auto& im = m.imports();
  REQUIRE(im.size() == 6);
  CHECK(im[0].module == "os");
  CHECK(im[0].bound == "os");
  CHECK(im[1].module == "yaml.loader");
  CHECK(im[1].bound == "yl");
  CHECK(im[1].top_level() == "yaml");
  CHECK(im[2].level == 1);
  CHECK(im[2].top_level().empty());
  CHECK(im[4].member == "b");
  CHECK(im[4].bound == "c");
  CHECK(im[4].level == 2);
  CHECK(im[5].module == "json");
  CHECK(im[5].line == 6);
}

TEST_CASE("calls know their enclosing function and await state") {
  auto m = Module::parse(
      "async def g():\n"
      "    x = await obj.fetch(1)\n"
      "    return fetch(2)\n"
      "fetch(0)\n");
  auto calls = m.calls_named("fetch");
  REQUIRE(calls.size() == 3);
  CHECK(calls[0].awaited);
  CHECK(calls[0].enclosing == m.find_function("g"));
  CHECK(m.tokens()[calls[0].start_token].text == "obj");
  CHECK_FALSE(calls[1].awaited);
  CHECK(calls[2].enclosing == nullptr);
  CHECK(calls[2].line == 4);
}

TEST_CASE("insertions never touch existing bytes") {
  std::string src = "abc";
  CHECK(apply_insertions(src, {{1, "X"}, {1, "Y"}, {3, "!"}, {0, "<"}}) == "<aXYbc!");
  auto m = Module::parse("a\r\nb\r\n");
  CHECK(m.newline() == "\r\n");
  CHECK(m.line_offset(2) == 3);
}

TEST_CASE("syntax errors surface as SyntaxUnparsable") {
  try {
    Module::parse("def f(:\n  'unterminated\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SyntaxUnparsable);
  }
}
