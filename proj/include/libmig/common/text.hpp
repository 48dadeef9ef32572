#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace libmig::text {

/// Splits into lines that keep their terminators ("a\nb" -> {"a\n", "b"}).
/// Concatenating the result reproduces the input exactly.
std::vector<std::string> split_lines(std::string_view text);

std::string join(const std::vector<std::string>& lines);

std::string_view trim(std::string_view s);

/// Line content without its "\n" / "\r\n" terminator.
std::string_view strip_eol(std::string_view line);

std::vector<std::string> split_ws(std::string_view s);

/// PEP 503 normalization: lower-case, runs of [-_.] collapse to '-'.
std::string normalize_package_name(std::string_view name);

bool is_identifier(std::string_view s);

/// Identifier-shaped tokens ([A-Za-z_][A-Za-z0-9_]*) found in a line.
std::vector<std::string_view> identifier_tokens(std::string_view line);

/// "\r\n" when the text's first line break is CRLF, otherwise "\n".
std::string_view detect_newline(std::string_view text);

}  // namespace libmig::text
