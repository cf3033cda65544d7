#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace aetas::unicode {

// Decodes one UTF-8 code point starting at s[pos]; advances pos. Invalid
// bytes decode to U+FFFD and advance by one so tokenization never stalls.
char32_t decode(std::string_view s, std::size_t& pos);

void encode(char32_t cp, std::string& out);

// Alphabetic / decimal-digit classification over the script ranges that
// occur in European historical text (Latin + supplements/extensions, IPA,
// Greek, Cyrillic). Outside those ranges everything is treated as
// non-alphabetic, which maps it to a token separator.
bool is_alpha(char32_t cp);
bool is_digit(char32_t cp);

char32_t to_lower(char32_t cp);

}  // namespace aetas::unicode
