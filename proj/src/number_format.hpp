// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace llmsim::detail {

// Shortest representation that parses back to the same double. Locale
// independent.
std::string format_number(double value);

std::optional<double> parse_number(std::string_view text);

}  // namespace llmsim::detail
