#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpp {

// Shortest decimal form that round-trips exactly (std::to_chars). Used for
// every number we serialize so that outputs are bit-reproducible.
std::string fmt_double(double x);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// FNV-1a, used for config fingerprints.
std::uint64_t fnv1a64(std::string_view s);
std::string hex16(std::uint64_t x);

}  // namespace fpp
