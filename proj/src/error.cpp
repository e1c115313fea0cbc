// Copyright 2026 The semmap Authors
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

#include "semmap/error.hpp"

namespace semmap
{

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::NonPositiveDisparity: return "NonPositiveDisparity";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownColor: return "UnknownColor";
    case ErrorCode::DegenerateProbability: return "DegenerateProbability";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::DatasetIncomplete: return "DatasetIncomplete";
    case ErrorCode::MismatchedDatasets: return "MismatchedDatasets";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string & message)
: std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

}  // namespace semmap
