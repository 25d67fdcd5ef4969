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

#include <optional>
#include <string>
#include <vector>

#include "iqseq/quantum.hpp"

namespace iqseq {

/// Path weights c_{k,jm} used to carry the complement of the intermediate
/// POVM's support into the residual Kraus operators: weights[j][k](m).
/// For each j the squared magnitudes over pairs with nu_kj > 0 must sum to 1.
using PathWeights = std::vector<std::vector<ComplexVector>>;

/// How the orthocomplement of the intermediate POVM's support is carried to
/// the output space when the output is too small to hold it alongside the
/// image of the existing residual operators.
struct AuxInstrumentPolicy {
  /// Fill leftover image capacity of the existing residual operators first
  /// (largest capacity first); only the remainder becomes new operators,
  /// packed in groups of at most dim_out onto the first live outcome.
  bool absorb_into_existing = true;
};

/// Result of splitting a total instrument into an initial instrument followed
/// by outcome-conditioned residual instruments.
struct TwoStepDecomposition {
  Instrument initial;                 // dim_in -> intermediate_dim
  std::vector<Instrument> residuals;  // per intermediate outcome j
  StochasticMatrix postproc;          // rows aligned with the target outcomes
  PathWeights weights;                // as used (empty if never needed)
  Index intermediate_dim = 0;
  std::vector<Index> additional_kraus;  // auxiliary operators added, per j

  AdaptiveSequence as_asi() const;
};

/// Decomposes a total instrument T into the Lueders instrument of
/// B = nu(A^T) followed by residual instruments, one per outcome of B.
/// The residual Kraus operators are T_{k,jm} B_j^{-1/2} completed on the
/// orthocomplement of supp(B_j): for dim_in <= dim_out by weighted isometries
/// built from the singular bases of the T_{k,jm}, otherwise by the auxiliary
/// policy. Recomposition sum_j R^j_k o J_j = T_k holds by construction, and
/// residual outcomes with nu_kj = 0 are explicit zero operations.
TwoStepDecomposition two_step(
    const Instrument& target, const StochasticMatrix& nu,
    const std::optional<PathWeights>& weights = std::nullopt,
    double tol = kDefaultTol, const AuxInstrumentPolicy& policy = {});

/// Number of auxiliary Kraus operators the residual instrument for outcome j
/// needs when dim_in > dim_out; always 0 in the non-shrinking case.
Index count_additional_kraus(const Instrument& target,
                             const StochasticMatrix& nu,
                             const std::string& j_label,
                             double tol = kDefaultTol);

/// Variant of two_step whose intermediate space has dimension
/// d1 = max_j rank(B_j) < dim_in. The initial instrument is indecomposable
/// with Kraus K_j = M_j sqrt(B_j), the residuals are the two_step residuals
/// composed with the isometric channels M_j. Throws std::domain_error when
/// some B_j has full rank, signalling that the plain two_step path applies.
TwoStepDecomposition two_step_reduced(const Instrument& target,
                                      const StochasticMatrix& nu,
                                      double tol = kDefaultTol,
                                      const AuxInstrumentPolicy& policy = {});

/// Recursive N-step decomposition along a chain of postprocessings
/// A^T -> B^{N-1} -> ... -> B^1: chain[0] maps the target outcomes,
/// chain[i+1] maps chain[i]'s columns. Steps 1..N-1 are indecomposable
/// instruments on the input space; an empty chain yields the 1-step sequence.
AdaptiveSequence n_step(const Instrument& target,
                        const std::vector<StochasticMatrix>& chain,
                        double tol = kDefaultTol);

/// For a target whose outcome labels are N-tuples ("a,b,..."), builds the
/// N-step sequence in which step k determines the k-th tuple element: the
/// postprocessing chain marginalizes the rightmost component and every
/// branch satisfies T_{a} = I^{N,a_{N-1}} o ... o I^{1,1}_{a_1}.
AdaptiveSequence product_outcomes(const Instrument& target,
                                  double tol = kDefaultTol);

struct MinAncillaDecomposition {
  AdaptiveSequence asi;
  /// Final outcome label of the sequence -> outcome label of the target;
  /// padding slots with zero operations map to "".
  std::vector<std::string> coarse_map;
  Index detailed_rank = 0;  // r_T of the detailed target
};

/// Smallest-ancilla construction for g = ceil(dim_out/dim_in) > 1: the
/// detailed target is spread over g^{N-1} outcome slots with N minimal, so
/// that steps 1..N-1 have at most g live operations each and step N consists
/// of isometries. Coarse-graining the final outcome recovers the target.
MinAncillaDecomposition min_ancilla(const Instrument& target,
                                    double tol = kDefaultTol);

/// POVM special case: measurement statistics of A reproduced by the Lueders
/// instrument of B followed by conditional POVMs C^j, with
/// C^j_k = B_j^{-1/2} nu_kj A_k B_j^{-1/2} plus the complement of supp(B_j)
/// assigned to the first outcome with nu_kj > 0.
struct PovmTwoStep {
  Instrument initial;
  std::vector<Povm> conditional;  // per outcome of B
  StochasticMatrix postproc;

  /// The sequence with the conditional POVMs embedded as instruments with
  /// one-dimensional output, so it verifies like any other decomposition.
  AdaptiveSequence as_asi(double tol = kDefaultTol) const;
};

PovmTwoStep povm_two_step(const Povm& target, const StochasticMatrix& nu,
                          double tol = kDefaultTol);

/// One step of a process whose instrument choice may depend on the entire
/// outcome history. Step k maps each history (b_1,...,b_{k-1}) to the
/// instrument applied next; step 1 holds a single entry with empty history.
struct HistoryStep {
  std::vector<std::pair<std::vector<std::string>, Instrument>> table;

  const Instrument& instrument_for(
      const std::vector<std::string>& history) const;
};

/// Recasts a history-dependent process as an adaptive sequence by enlarging
/// step k's outcome set to the tuples (b_1,...,b_k); operations on tuples
/// whose prefix contradicts the realized history are explicit zeros, so the
/// trajectory distribution is unchanged.
AdaptiveSequence lift_history_dependence(const std::vector<HistoryStep>& raw);

}  // namespace iqseq
