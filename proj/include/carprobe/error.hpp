/* Copyright 2026 The carprobe Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CARPROBE_ERROR_HPP_
#define CARPROBE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace carprobe {

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kUnknownConcept,
  kInsufficientExamples,
  kDegenerateData,
  kEmptyClass,
  kBadClassIndex,
  kShapeUnknown,
  kParseError,
  kNonFiniteValue,
  kRaggedRows,
  kUnbalancedSets,
  kUnknownId,
  kDuplicateId,
  kVersionMismatch,
  kSchemaError,
  kIoError,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this exception; callers that
// need to branch on the failure mode inspect kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kUnknownConcept: return "UnknownConcept";
    case ErrorKind::kInsufficientExamples: return "InsufficientExamples";
    case ErrorKind::kDegenerateData: return "DegenerateData";
    case ErrorKind::kEmptyClass: return "EmptyClass";
    case ErrorKind::kBadClassIndex: return "BadClassIndex";
    case ErrorKind::kShapeUnknown: return "ShapeUnknown";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kNonFiniteValue: return "NonFiniteValue";
    case ErrorKind::kRaggedRows: return "RaggedRows";
    case ErrorKind::kUnbalancedSets: return "UnbalancedSets";
    case ErrorKind::kUnknownId: return "UnknownId";
    case ErrorKind::kDuplicateId: return "DuplicateId";
    case ErrorKind::kVersionMismatch: return "VersionMismatch";
    case ErrorKind::kSchemaError: return "SchemaError";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

inline void require_same_dim(long expected, long actual, std::string_view what) {
  if (expected != actual) {
    throw Error(ErrorKind::kDimensionMismatch,
                std::string(what) + ": expected dimension " + std::to_string(expected) +
                    ", got " + std::to_string(actual));
  }
}

}  // namespace carprobe

#endif  // CARPROBE_ERROR_HPP_
