// Copyright (c) 2026 The enforcekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace enforcekit {

enum class Severity { error, warning };

/// A finding from one of the static or replay validators.
struct Diagnostic {
  Severity severity = Severity::error;
  std::string code;  // stable machine-readable tag, e.g. "nondeterminism"
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

inline std::size_t count_severity(const Diagnostics& diags, Severity severity) {
  std::size_t n = 0;
  for (const auto& d : diags) n += d.severity == severity ? 1 : 0;
  return n;
}

inline const char* to_string(Severity severity) {
  return severity == Severity::error ? "error" : "warning";
}

}  // namespace enforcekit
