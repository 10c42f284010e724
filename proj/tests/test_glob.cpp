#include <doctest.h>

#include <random>
#include <string>

#include "evstream/glob.hpp"
#include "evstream/types.hpp"

using namespace evstream;

namespace {

// Reference matcher: naive recursion, obviously correct.
bool naive_match(std::string_view pattern, std::string_view text) {
  if (pattern.empty()) return text.empty();
  if (pattern[0] == '*') {
    for (size_t skip = 0; skip <= text.size(); ++skip) {
      if (naive_match(pattern.substr(1), text.substr(skip))) return true;
    }
    return false;
  }
  if (text.empty()) return false;
  if (pattern[0] == '?' || pattern[0] == text[0]) {
    return naive_match(pattern.substr(1), text.substr(1));
  }
  return false;
}

}  // namespace

TEST_CASE("glob: literals, star and question mark") {
  CHECK(glob_match("score:*", "score:game1"));
  CHECK(glob_match("score:*", "score:"));
  CHECK_FALSE(glob_match("score:*", "scores"));
  CHECK(glob_match("sco?es", "scores"));
  CHECK_FALSE(glob_match("sco?es", "scoes"));
  CHECK(glob_match("*", ""));
  CHECK(glob_match("*", "anything"));
  CHECK(glob_match("a*b*c", "axxbyyc"));
  CHECK_FALSE(glob_match("a*b*c", "axxbyy"));
  CHECK(glob_match("abc", "abc"));
  CHECK_FALSE(glob_match("abc", "abd"));
  CHECK_FALSE(glob_match("", "x"));
  CHECK(glob_match("***", ""));
}

TEST_CASE("glob: validity bounds") {
  CHECK_FALSE(glob_valid(""));
  CHECK(glob_valid("*"));
  CHECK(glob_valid(std::string(kMaxGlobBytes, 'a')));
  CHECK_FALSE(glob_valid(std::string(kMaxGlobBytes + 1, 'a')));
}

TEST_CASE("glob: agrees with naive matcher on random pairs") {
  std::mt19937_64 rng(20240901);
  const char alphabet[] = {'a', 'b', 'c', '*', '?', ':'};
  std::uniform_int_distribution<size_t> pat_len(1, 32);
  std::uniform_int_distribution<size_t> txt_len(0, 24);
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_int_distribution<int> pick_text(0, 2);  // text never holds metachars

  for (int i = 0; i < 20000; ++i) {
    std::string pattern, text;
    const size_t pl = pat_len(rng), tl = txt_len(rng);
    for (size_t k = 0; k < pl; ++k) pattern += alphabet[pick(rng)];
    for (size_t k = 0; k < tl; ++k) text += alphabet[pick_text(rng)];
    CAPTURE(pattern);
    CAPTURE(text);
    REQUIRE(glob_match(pattern, text) == naive_match(pattern, text));
  }
}
