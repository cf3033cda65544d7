#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aetas::csv {

// RFC-4180 style quoting; fields are quoted only when they need it so the
// common all-plain case stays diffable.
std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

// Parses a full CSV document (quotes honored). Rows keep their field count;
// no header inference.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace aetas::csv
