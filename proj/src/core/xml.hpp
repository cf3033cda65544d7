#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aetas::xml {

struct Attribute {
  std::string name;
  std::string value;
};

struct Callbacks {
  std::function<void(std::string_view, const std::vector<Attribute>&)> start_element;
  std::function<void(std::string_view)> end_element;
  // Decoded character data; one call per contiguous run.
  std::function<void(const std::string&)> text;
};

// Minimal event parser for well-formed XML: elements, attributes, character
// data, CDATA, comments, processing instructions, DOCTYPE, and the standard
// entities plus numeric references. Throws DataError with the byte offset on
// malformed input.
void parse(std::string_view input, const Callbacks& cb);

}  // namespace aetas::xml
