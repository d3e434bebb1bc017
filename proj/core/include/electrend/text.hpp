#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 helpers for tweet text. Case folding and the word-character
// class cover the Latin, Greek and Cyrillic blocks plus common letter scripts;
// this is not a full Unicode implementation.
namespace electrend::text {

/// Decodes the code point starting at `pos` and advances `pos`.
/// Invalid sequences decode to U+FFFD and consume one byte.
char32_t decode(std::string_view s, std::size_t& pos);
void append_utf8(std::string& out, char32_t cp);

/// Letters, digits, underscore and combining marks.
bool is_word_char(char32_t cp);
char32_t to_lower(char32_t cp);
/// Maps an accented lowercase Latin letter to its base letter (á -> a, ñ -> n).
char32_t strip_accent(char32_t cp);

std::string lower(std::string_view s);
/// Lowercase with accents removed; used for case- and diacritic-insensitive matching.
std::string search_key(std::string_view s);
/// Lowercase, whitespace runs collapsed to one space, trimmed.
std::string normalize_whitespace_lower(std::string_view s);

/// Maximal runs of word characters, lowercased, in order of appearance.
std::vector<std::string> words(std::string_view s);

}  // namespace electrend::text
