// Copyright 2026 The rww-crowdfund Authors
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

namespace rww {

enum class ErrorCode {
  // data errors
  InvalidControl,
  UnknownQuestionId,
  EmptyDataset,
  SingleGroup,
  ConstantColumn,
  ParseError,
  SchemaVersionError,
  InvariantViolation,
  TermMismatch,
  UnknownModel,
  BadK,
  TooManyCandidates,
  // numerical errors
  RankDeficient,
  Underdetermined,
  DegenerateDoF,
  DegenerateSample,
  EmptyMatrix,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidControl: return "InvalidControl";
    case ErrorCode::UnknownQuestionId: return "UnknownQuestionId";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SingleGroup: return "SingleGroup";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaVersionError: return "SchemaVersionError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::TermMismatch: return "TermMismatch";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::TooManyCandidates: return "TooManyCandidates";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::DegenerateDoF: return "DegenerateDoF";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
  }
  return "Unknown";
}

/// True for failures of the numerical kernel (as opposed to bad input data).
constexpr bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient:
    case ErrorCode::Underdetermined:
    case ErrorCode::DegenerateDoF:
    case ErrorCode::DegenerateSample:
    case ErrorCode::EmptyMatrix:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rww
