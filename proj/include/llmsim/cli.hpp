// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace llmsim {

// Exit statuses besides the ErrorCategory values.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the llmsim command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Text listing every modeling default in effect.
std::string assumptions_text();

}  // namespace llmsim
