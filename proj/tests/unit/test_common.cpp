#include <doctest.h>

#include "libmig/common/fs.hpp"
#include "libmig/common/process.hpp"
#include "libmig/common/text.hpp"
#include "libmig/error.hpp"
#include "support.hpp"

using namespace libmig;
using testsupport::TempDir;

TEST_CASE("split_lines keeps terminators and joins back") {
  for (std::string s : {"", "a", "a\n", "a\nb", "a\r\nb\n\n", "\n\n"}) {
    auto lines = text::split_lines(s);
    CHECK(text::join(lines) == s);
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) CHECK(lines[i].ends_with('\n'));
  }
  CHECK(text::split_lines("a\nb") == std::vector<std::string>{"a\n", "b"});
  CHECK(text::split_lines("").empty());
}

TEST_CASE("small text helpers") {
  CHECK(text::trim("  x y \t") == "x y");
  CHECK(text::strip_eol("abc\r\n") == "abc");
  CHECK(text::strip_eol("abc\n") == "abc");
  CHECK(text::split_ws(" a  b\tc ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(text::normalize_package_name("Py_YAML.Ext") == "py-yaml-ext");
  CHECK(text::normalize_package_name("ruamel..yaml") == "ruamel-yaml");
  CHECK(text::is_identifier("_x1"));
  CHECK_FALSE(text::is_identifier("1x"));
  CHECK_FALSE(text::is_identifier(""));
  auto toks = text::identifier_tokens("y = yaml.safe_load(s2) + 3");
  CHECK(std::vector<std::string>(toks.begin(), toks.end()) ==
        std::vector<std::string>{"y", "yaml", "safe_load", "s2"});
  CHECK(text::detect_newline("a\r\nb\n") == "\r\n");
  CHECK(text::detect_newline("a\nb\r\n") == "\n");
}

TEST_CASE("test file convention") {
  CHECK(fs::is_test_file("test_x.py"));
  CHECK(fs::is_test_file("pkg/x_test.py"));
  CHECK(fs::is_test_file("conftest.py"));
  CHECK(fs::is_test_file("tests/helpers.py"));
  CHECK(fs::is_test_file("a/test/util.py"));
  CHECK_FALSE(fs::is_test_file("contest.py"));
  CHECK_FALSE(fs::is_test_file("testing/util.py"));
  CHECK_FALSE(fs::is_test_file("src/latest.py"));
}

TEST_CASE("python file listing skips environments and caches") {
  TempDir d("fs");
  testsupport::spit(d / "a.py", "");
  testsupport::spit(d / "pkg/b.py", "");
  testsupport::spit(d / "pkg/readme.txt", "");
  testsupport::spit(d / ".hidden/c.py", "");
  testsupport::spit(d / "__pycache__/d.py", "");
  testsupport::spit(d / "venv/pyvenv.cfg", "");
  testsupport::spit(d / "venv/lib/e.py", "");
  testsupport::spit(d / "out/f.py", "");
  auto files = fs::list_python_files(d.path(), {d / "out"});
  CHECK(files == std::vector<std::string>{"a.py", "pkg/b.py"});
  auto tree = fs::read_tree(d.path(), files);
  CHECK(tree.size() == 2);
}

TEST_CASE("path helpers") {
  CHECK(fs::is_under("/a/b/c", "/a/b"));
  CHECK(fs::is_under("/a/b", "/a/b"));
  CHECK_FALSE(fs::is_under("/a/bc", "/a/b"));
  CHECK(fs::relative_to("/a/b/c/d.py", "/a/b") == "c/d.py");
  CHECK(fs::relative_to("/x/d.py", "/a/b").empty());
  CHECK(fs::normalize("/a/./b/../c") == std::filesystem::path("/a/c"));
}

TEST_CASE("atomic write replaces content") {
  TempDir d("fs");
  fs::write_file_atomic(d / "f.txt", "one");
  fs::write_file_atomic(d / "f.txt", "two");
  CHECK(fs::read_file(d / "f.txt") == "two");
  CHECK_THROWS_AS(fs::read_file(d / "missing"), Error);
}

TEST_CASE("run_process captures output, exit code and timeouts") {
  auto r = run_process({"sh", "-c", "echo out; echo err >&2; exit 3"});
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("out") != std::string::npos);
  CHECK(r.output.find("err") != std::string::npos);
  ProcessOptions o;
  o.env["LIBMIG_T"] = "v42";
  o.cwd = "/";
  r = run_process({"sh", "-c", "echo $LIBMIG_T; pwd"}, o);
  CHECK(r.output == "v42\n/\n");
  o.timeout = std::chrono::milliseconds(200);
  r = run_process({"sh", "-c", "sleep 5"}, o);
  CHECK(r.timed_out);
  CHECK(find_on_path("sh").has_value());
  CHECK_FALSE(find_on_path("libmig-no-such-binary").has_value());
}

TEST_CASE("error kinds have stable names") {
  CHECK(to_string(ErrorKind::InsertOutOfRange) == "InsertOutOfRange");
  CHECK(to_string(ErrorKind::NoBaselinePassingTests) == "NoBaselinePassingTests");
  ProfileError pe(7, "bad");
  CHECK(pe.line() == 7);
  CHECK(pe.kind() == ErrorKind::MalformedProfile);
}
