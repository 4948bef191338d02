// Copyright 2026 The gruscreen Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gruscreen {

enum class ErrorCode {
  kEmptyCorpus,
  kShapeMismatch,
  kIndexOutOfVocab,
  kStaleCache,
  kBadFractions,
  kEmptyDataset,
  kLengthMismatch,
  kBadLabel,
  kDegenerateClass,
  kIoError,
  kChecksumMismatch,
  kVersionUnsupported,
  kFormatError,
  kBankInvalid,
  kSessionNotFound,
  kSessionClosed,
  kModelNotLoaded,
  kInvalidArgument,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kIndexOutOfVocab: return "IndexOutOfVocab";
    case ErrorCode::kStaleCache: return "StaleCache";
    case ErrorCode::kBadFractions: return "BadFractions";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kDegenerateClass: return "DegenerateClass";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kBankInvalid: return "BankInvalid";
    case ErrorCode::kSessionNotFound: return "SessionNotFound";
    case ErrorCode::kSessionClosed: return "SessionClosed";
    case ErrorCode::kModelNotLoaded: return "ModelNotLoaded";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gruscreen
