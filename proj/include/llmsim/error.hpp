// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace llmsim {

// Every failure the library reports derives from Error. The category maps
// onto a distinct CLI exit status.
enum class ErrorCategory {
  kConfig = 3,      // schema violation in a config document
  kLookup = 4,      // unknown profile/model/scenario name
  kIo = 5,          // unreadable input or unwritable output
  kValidation = 6,  // well-formed input with invalid values
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::kConfig, what) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& what)
      : Error(ErrorCategory::kLookup, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::kValidation, what) {}
};

const char* category_name(ErrorCategory category);

}  // namespace llmsim
