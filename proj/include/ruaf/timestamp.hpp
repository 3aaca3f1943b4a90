#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ruaf {

using EpochSeconds = std::int64_t;

// Strict parser for the FutureLearn export format "YYYY-MM-DD HH:MM:SS UTC".
// Returns nullopt on any deviation (wrong width, non-digits, invalid calendar
// date, missing "UTC" suffix). Years accepted: 1970..9999.
std::optional<EpochSeconds> parse_timestamp(const std::string& text);

std::string format_timestamp(EpochSeconds t);

}  // namespace ruaf
