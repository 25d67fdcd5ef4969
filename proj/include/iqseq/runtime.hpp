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

#include <cstdint>
#include <string>
#include <vector>

#include "iqseq/quantum.hpp"

namespace iqseq {

/// SplitMix64 (Steele, Lea & Flood). Fixed bit-level specification, so runs
/// reproduce across platforms; independent per-shot streams derive from
/// (seed, stream index).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double next_double();

  static std::uint64_t scramble(std::uint64_t x);
  static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t state_;
};

struct Trajectory {
  std::vector<std::string> outcomes;  // a_1, ..., a_N
  ComplexMatrix final_state;          // normalized
  double probability = 0.0;           // joint probability of the label path
};

struct RunStatistics {
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  bool intermediate_recorded = false;
  /// Counts per final outcome, in the sequence's outcome order.
  std::vector<std::pair<std::string, std::uint64_t>> final_counts;
  /// Counts per full label sequence (steps joined with ";"), sorted by key;
  /// filled only when intermediate recording is on.
  std::vector<std::pair<std::string, std::uint64_t>> sequence_counts;
  /// Branches whose outcome probabilities missed unit mass by more than 1e-9
  /// and were renormalized.
  std::uint64_t renormalized_branches = 0;
};

struct RunResult {
  RunStatistics stats;
  std::vector<Trajectory> trajectories;  // first few shots, for inspection
};

/// Total instrument of the sequence: intermediate outcomes summed out, final
/// outcome kept, operations compressed to minimal Kraus rank.
Instrument total_instrument(const AdaptiveSequence& asi,
                            double tol = kDefaultTol);

/// Samples Born-rule trajectories. Outcomes are drawn by cumulative
/// probability in outcome order; a run is fully determined by (asi, rho0,
/// shots, seed). Throws std::runtime_error when every outcome probability
/// vanishes at some step.
RunResult run(const AdaptiveSequence& asi, const DensityMatrix& rho0,
              std::uint64_t shots, std::uint64_t seed,
              bool record_intermediate = false,
              std::size_t max_trajectories = 16);

struct OutcomeCheck {
  std::string label;
  double choi_distance = 0.0;
};

struct EquivalenceReport {
  std::vector<OutcomeCheck> per_outcome;
  double max_choi_distance = 0.0;
  double povm_distance = 0.0;     // largest effect deviation (Frobenius)
  double channel_distance = 0.0;  // induced-channel Choi distance
  double tolerance = 0.0;
  bool pass = false;
};

/// Checks that the sequence's total instrument reproduces the target
/// operation by operation, and separately at the induced-POVM and
/// induced-channel level.
EquivalenceReport verify_equivalence(const AdaptiveSequence& asi,
                                     const Instrument& target,
                                     double tol = kDefaultTol);

}  // namespace iqseq
