#pragma once

#include <string>
#include <string_view>

namespace libmig::llm {

/// Body of the largest fenced block tagged python (`python`, `py`,
/// `python3`); failing that the largest untagged block, then the largest
/// block of any tag. The newline right before the closing fence belongs to
/// the fence. An unterminated fence runs to the end of the response.
/// Throws Error(NoCodeBlock).
std::string extract_code(std::string_view response);

}  // namespace libmig::llm
