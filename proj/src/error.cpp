// Copyright 2026 The mcg Authors
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

#include "mcg/error.hpp"

namespace mcg {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::explosive_process: return "explosive_process";
    case ErrorCode::non_convergence: return "non_convergence";
    case ErrorCode::rank_deficient: return "rank_deficient";
    case ErrorCode::singular_information: return "singular_information";
    case ErrorCode::bootstrap_failed: return "bootstrap_failed";
  }
  return "unknown";
}

}  // namespace mcg
