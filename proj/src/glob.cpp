#include "evstream/glob.hpp"

#include "evstream/types.hpp"

namespace evstream {

bool glob_valid(std::string_view pattern) {
  return !pattern.empty() && pattern.size() <= kMaxGlobBytes;
}

// Iterative matcher with single-star backtracking; linear in practice,
// O(n*m) worst case. Verified against a naive recursive matcher in tests.
bool glob_match(std::string_view pattern, std::string_view text) {
  size_t p = 0, t = 0;
  size_t star_p = std::string_view::npos;
  size_t star_t = 0;

  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star_p = p++;
      star_t = t;
    } else if (star_p != std::string_view::npos) {
      p = star_p + 1;
      t = ++star_t;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace evstream
