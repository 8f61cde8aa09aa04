// SPDX-License-Identifier: Apache-2.0

#include "llmsim/error.hpp"

namespace llmsim {

const char* category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kLookup:
      return "lookup";
    case ErrorCategory::kIo:
      return "io";
    case ErrorCategory::kValidation:
      return "validation";
  }
  return "error";
}

}  // namespace llmsim
