#pragma once

#include <cstddef>
#include <string>
#include <string_view>

// Minimal UTF-8 helpers. Case mapping covers Latin (incl. Latin-1 and
// Latin Extended-A), Greek and Cyrillic; other scripts are left untouched.
namespace kpcloud::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes the code point starting at text[pos] and advances pos. Invalid or
// truncated sequences yield U+FFFD and consume exactly one byte, so decoding
// always makes progress and never reads past the end.
char32_t decode(std::string_view text, std::size_t& pos);

void append(std::string& out, char32_t cp);

char32_t to_lower(char32_t cp);
char32_t to_upper(char32_t cp);
bool is_upper(char32_t cp);
bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);
bool is_line_break(char32_t cp);
bool is_punct(char32_t cp);
// . ! ? : ; and the horizontal ellipsis.
bool is_sentence_terminator(char32_t cp);

std::string fold_case(std::string_view text);
std::size_t length(std::string_view text);
std::size_t count_upper(std::string_view text);
bool has_letter(std::string_view text);
bool starts_upper(std::string_view text);

// Maps accented Latin letters to their unaccented base (lower case only).
std::string strip_accents(std::string_view text);

}  // namespace kpcloud::utf8
