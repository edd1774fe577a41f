// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace egoview {

enum class ErrorKind {
  InvalidArgument,
  BehindCamera,
  EmptyInput,
  Schema,
  DuplicateId,
  UnknownScene,
  UnknownObjectId,
  NoViews,
  TooManyViews,
  MissingGold,
  DuplicatePrediction,
  InvalidImageReference,
  ServiceUnavailable,
  ServiceProtocol,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace egoview
