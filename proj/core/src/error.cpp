// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/error.hpp"

namespace fisherspike {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kUnsupportedModel: return "unsupported model";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kPole: return "pole";
    case ErrorCode::kSpikeInsideBulk: return "spike inside bulk";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kClassification: return "classification error";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kMismatch: return "mismatch";
    case ErrorCode::kSingular: return "singular matrix";
    case ErrorCode::kResolvent: return "resolvent error";
    case ErrorCode::kGeometry: return "geometry error";
    case ErrorCode::kHarness: return "harness error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "io error";
  }
  return "error";
}

}  // namespace fisherspike
