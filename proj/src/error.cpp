// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#include "egoview/error.hpp"

namespace egoview {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownScene: return "UnknownScene";
    case ErrorKind::UnknownObjectId: return "UnknownObjectId";
    case ErrorKind::NoViews: return "NoViews";
    case ErrorKind::TooManyViews: return "TooManyViews";
    case ErrorKind::MissingGold: return "MissingGold";
    case ErrorKind::DuplicatePrediction: return "DuplicatePrediction";
    case ErrorKind::InvalidImageReference: return "InvalidImageReference";
    case ErrorKind::ServiceUnavailable: return "ServiceUnavailable";
    case ErrorKind::ServiceProtocol: return "ServiceProtocol";
  }
  return "Unknown";
}

}  // namespace egoview
