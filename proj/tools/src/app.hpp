#pragma once

#include <array>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace grushin::cli {

// Exit codes: 0 success, 1 verify found a failing invariant, 2 usage or input
// error, 3 numerical failure. Errors print one JSON line on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "a,b,c" -> {a, b, c}; anything else is an input error naming the flag.
std::array<double, 3> parse_triple(std::string_view text, std::string_view flag);

}  // namespace grushin::cli
