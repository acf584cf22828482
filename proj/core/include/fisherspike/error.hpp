// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fisherspike {

/// Failure categories raised by the library. Every public operation reports
/// contract violations by throwing `Error` tagged with one of these.
enum class ErrorCode {
  kInvalidArgument,
  kUnsupportedModel,
  kDomain,
  kPole,
  kSpikeInsideBulk,
  kConfig,
  kClassification,
  kDegenerate,
  kMismatch,
  kSingular,
  kResolvent,
  kGeometry,
  kHarness,
  kParse,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fisherspike
