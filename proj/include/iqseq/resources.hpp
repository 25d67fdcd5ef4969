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

#include <vector>

#include "iqseq/decompose.hpp"
#include "iqseq/quantum.hpp"

namespace iqseq {

/// Ancilla and step accounting of a decomposition.
struct ResourceReport {
  Index g = 1;               // dimension-increase factor ceil(d_N / d_0)
  std::vector<Index> ranks;  // minimal Kraus rank per target outcome
  Index total_rank = 0;      // r_T
  std::vector<Index> m;      // operator count per last-step key (incl. aux)
  Index ancilla_dim = 0;     // d_A
  Index ancilla_qubits = 0;  // n_A = ceil(log2 d_A)
  Index steps = 1;           // N
  std::vector<Index> dims;   // d_0 ... d_N
  std::vector<Index> step_ancilla;  // available ancilla floor(d_0 d_A / d_k)
  double min_steps_bound = 0.0;     // log_{d_A}(g r_T)
  double tradeoff_bound = 0.0;      // log2(g r_T)
  Index rank_bound = 0;             // product of floor(d_0 d_A / d_k)
  bool rank_bound_satisfied = true;
  bool tradeoff_satisfied = true;
};

/// g = ceil(dim_out / dim_in); 1 when the dimensions agree.
Index dimension_factor(Index dim_in, Index dim_out);

/// Ancilla dimension d_A = max(g ceil(|Omega_B|/g), {g m_j}) of the two-step
/// plan given by nu, with m_j the summed minimal ranks over live rows.
/// Throws std::domain_error in the shrinking case, where no closed formula
/// applies.
Index ancilla_dimension(const Instrument& target, const StochasticMatrix& nu,
                        double tol = kDefaultTol);

/// Minimal two-step ancilla d_A = g ceil(sqrt(r_T / g)).
Index minimal_ancilla_two_step(Index r_t, Index g);

/// Minimal N-step ancilla d_A = g ceil((g r_T)^{1/N} / g), computed with
/// integer arithmetic so boundary cases are exact.
Index minimal_ancilla_n_step(Index r_t, Index g, Index n);

/// Smallest N with r_T <= d_A^{N-1} (d_A / g). Throws std::domain_error when
/// d_A < g or when no finite N works (d_A = 1 with g r_T > 1).
Index min_steps(Index r_t, Index g, Index d_a);

/// Lower bound on N n_A: log2(g r_T).
double tradeoff_bound(Index r_t, Index g);

/// Upper bound on the realizable total rank through the given per-step
/// dimensions: product over k of floor(d_0 d_A / d_k).
Index rank_upper_bound(Index d_a, Index d0, const std::vector<Index>& step_dims);

struct PartitionPlan {
  std::vector<Index> sizes;  // descending
  Index ancilla_dim = 0;
};

/// Balanced split of r_T detailed outcomes minimizing
/// g max(ceil(|Omega_B|/g), max_j |omega_j|); achieves the two-step optimum.
PartitionPlan optimal_partition(Index r_t, Index g);

/// Brute-force minimum over all set partitions of r_T items into nonempty
/// groups. Throws std::invalid_argument for r_t > 12.
Index exhaustive_partition_oracle(Index r_t, Index g);

/// 0/1 matrix assigning each row to its maximal column (ties: lowest column
/// index). Replacing nu by this never increases max_j m_j.
StochasticMatrix argmax_coarse_graining(const StochasticMatrix& nu);

/// Report for a two-step decomposition of `target`.
ResourceReport two_step_report(const Instrument& target,
                               const TwoStepDecomposition& dec,
                               double tol = kDefaultTol);

/// Report for an adaptive sequence; `total` is its total instrument.
ResourceReport asi_report(const AdaptiveSequence& asi, const Instrument& total,
                          double tol = kDefaultTol);

}  // namespace iqseq
