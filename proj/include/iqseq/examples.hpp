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

#include <array>
#include <optional>
#include <string>

#include "iqseq/quantum.hpp"

namespace iqseq {

/// Parameters of the four-outcome qubit family. The effects are
/// A_jk = (1/4)[I + eta sec(theta_j) n_jk.sigma] with theta_0 = beta,
/// theta_1 = alpha; eta <= min(cos alpha, cos beta) keeps them positive.
struct ExampleParams {
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 0.0;

  /// alpha = beta = arccos(1/sqrt(3)), eta = 1/sqrt(3): the SIC-POVM point.
  static ExampleParams sic();
  /// Throws std::invalid_argument outside 0 < beta <= alpha < pi/2,
  /// 0 < eta <= min(cos alpha, cos beta).
  void check() const;
};

/// Three-outcome qutrit POVM with effects (P0+P1)/2, (P1+P2)/2, (P2+P0)/2.
Povm three_outcome_povm();

/// Rank-one instrument from two qubits to one, outcomes "1","2","3":
/// K1 = |0><00| + |1><01|/sqrt2, K2 = (|0><01| + |1><10|)/sqrt2,
/// K3 = |0><10|/sqrt2 + |1><11|.
Instrument shrinking_instrument();

/// Four-outcome qubit POVM with tuple labels "j,k".
Povm qubit4_povm(const ExampleParams& params);

/// Closed-form Kraus operators of the two-step realization of the family's
/// Lueders instrument: step 1 applies sqrt(B_j) = F+ I + F- n_Bj.sigma and
/// step 2 applies sqrt(A_jk) B_j^{-1/2} in the analogous G/H product form.
struct Qubit4ClosedForms {
  std::array<ComplexMatrix, 2> step1;                    // per j
  std::array<std::array<ComplexMatrix, 2>, 2> step2;     // per (j, k)
  std::array<Eigen::Vector3d, 2> n_b;                    // unit vectors
  std::array<std::array<Eigen::Vector3d, 2>, 2> n_a;
};

Qubit4ClosedForms qubit4_closed_forms(const ExampleParams& params);

/// Built-in generators: "three-outcome", "shrinking", "qubit4",
/// "qubit4-sic". Exactly one of the two members is set.
struct GeneratedExample {
  std::optional<Povm> povm;
  std::optional<Instrument> instrument;
};

GeneratedExample gen_example(const std::string& name,
                             const std::optional<ExampleParams>& params = {});

}  // namespace iqseq
