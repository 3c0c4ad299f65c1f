#pragma once

#include <cstddef>
#include <sstream>
#include <string>

namespace semwire {

// Textual scene description, transmitted verbatim as UTF-8.
struct Caption {
  std::string text;

  size_t byte_len() const { return text.size(); }

  bool empty() const { return text.empty(); }

  // Whitespace-token count; the caption length in words.
  size_t word_count() const {
    std::istringstream in(text);
    std::string tok;
    size_t n = 0;
    while (in >> tok) ++n;
    return n;
  }
};

}  // namespace semwire
