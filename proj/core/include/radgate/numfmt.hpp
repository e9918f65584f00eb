#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace radgate {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_shortest(double value);

/// Fixed significant-digit formatting ("%.Ng"), used by the plot emitters.
std::string format_significant(double value, int digits = 6);

/// Strict decimal parse of the whole string (leading/trailing blanks allowed).
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace radgate
