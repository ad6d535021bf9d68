#pragma once

// Small UTF-8 and whitespace helpers shared by the pipeline modules.
// All public offsets in the project are code point offsets; strings are
// stored as UTF-8 and converted at the edges with these helpers.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ie::text {

bool is_space(char c);

bool is_valid_utf8(std::string_view s);

/// Number of code points. Invalid sequences count one per byte.
std::size_t length(std::string_view s);

/// Byte offset of every code point start, plus a final entry equal to s.size().
std::vector<std::size_t> codepoint_starts(std::string_view s);

/// Decode to UTF-32. Invalid bytes decode to U+FFFD.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

std::string_view trim(std::string_view s);

/// Trim and replace every run of ASCII whitespace with one space.
std::string collapse_whitespace(std::string_view s);

/// True when s has no leading/trailing whitespace and only single spaces inside.
bool is_collapsed(std::string_view s);

/// ASCII and Latin-1 supplement lowercase. Byte length is preserved, which
/// lets callers map folded positions back onto the original string.
std::string fold_case(std::string_view s);

std::string ascii_upper(std::string_view s);

}  // namespace ie::text
