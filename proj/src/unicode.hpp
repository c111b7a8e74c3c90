#pragma once

// Minimal code-point utilities mirroring the string semantics the reference
// analyzer relies on: whitespace splitting, ASCII punctuation stripping,
// lowercasing and the "is upper" word-shape test.
//
// Case data covers ASCII, Latin-1, Latin Extended-A, basic Greek and basic
// Cyrillic. Code points outside those blocks are treated as uncased.

#include <string>
#include <string_view>

namespace igs::unicode {

// Invalid sequences decode to U+FFFD, one per offending byte.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view cps);

bool is_space(char32_t cp);
bool is_ascii_punct(char32_t cp);

bool is_lower(char32_t cp);
bool is_upper(char32_t cp);
bool is_title(char32_t cp);

// Appends the lowercase mapping of cp (may be two code points for U+0130).
void append_lower(std::u32string& out, char32_t cp);
std::u32string to_lower(std::u32string_view s);

// True when every cased code point is uppercase and at least one exists.
bool is_upper_word(std::u32string_view s);

std::u32string_view strip_space(std::u32string_view s);

}  // namespace igs::unicode
