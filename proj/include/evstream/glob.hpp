#pragma once

#include <string_view>

namespace evstream {

// Pattern language for key filters and channel subscriptions: literal bytes
// plus '*' (any sequence, including empty) and '?' (exactly one byte).
// There is no escape syntax.

// A pattern is valid iff it is non-empty and at most kMaxGlobBytes long.
bool glob_valid(std::string_view pattern);

bool glob_match(std::string_view pattern, std::string_view text);

}  // namespace evstream
