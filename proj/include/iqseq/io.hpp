// Copyright 2025 The iqseq developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "iqseq/quantum.hpp"
#include "iqseq/resources.hpp"
#include "iqseq/runtime.hpp"

namespace iqseq {

/// Field order in emitted files follows insertion order.
using Json = nlohmann::ordered_json;

/// Malformed or mistyped JSON; `pointer` locates the offending element.
class IoError : public std::runtime_error {
 public:
  IoError(std::string pointer, const std::string& message)
      : std::runtime_error(message + " at " +
                           (pointer.empty() ? "/" : pointer)),
        pointer_(std::move(pointer)) {}

  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

inline constexpr int kFormatVersion = 1;

Json to_json(const Povm& povm);
Json to_json(const Instrument& ins);
Json to_json(const StochasticMatrix& nu);
Json to_json(const AdaptiveSequence& asi);
Json to_json(const DensityMatrix& state);
Json to_json(const ResourceReport& report);
Json to_json(const RunStatistics& stats);
Json to_json(const EquivalenceReport& report);
Json to_json(const std::vector<Diagnostic>& diags);

Povm povm_from_json(const Json& j, const std::string& at = "");
Instrument instrument_from_json(const Json& j, const std::string& at = "");
StochasticMatrix stochastic_from_json(const Json& j,
                                      const std::string& at = "");
AdaptiveSequence asi_from_json(const Json& j, const std::string& at = "");
DensityMatrix state_from_json(const Json& j, const std::string& at = "");

enum class FileKind { Povm, Instrument, Asi, Stochastic, State, Unknown };

/// Classifies a document by its fields ("effects" vs "operations" vs "steps"
/// vs "rows"/"cols"/"matrix" vs "rho").
FileKind sniff(const Json& j);

/// Reads and parses a file; "-" means stdin. Parse failures raise IoError.
Json load_json(const std::string& path);

}  // namespace iqseq
