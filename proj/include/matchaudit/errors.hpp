// Copyright 2026 The matchaudit Authors
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

namespace matchaudit {

// Thrown when an enumeration or search would exceed a documented cap. The
// message names the cap so callers can tell which knob to raise.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(const std::string& what, const std::string& cap_name,
                     long long cap_value)
      : std::runtime_error(what + " (cap " + cap_name + " = " +
                           std::to_string(cap_value) + ")") {}
};

// Thrown when a prior is conditioned on an event of exactly zero mass.
class ZeroMassEventError : public std::runtime_error {
 public:
  explicit ZeroMassEventError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace matchaudit
