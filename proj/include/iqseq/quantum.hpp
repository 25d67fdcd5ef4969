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

#include <string>
#include <vector>

#include "iqseq/linalg.hpp"
#include "iqseq/types.hpp"

namespace iqseq {

/// One violated invariant, with the numeric residual that tripped it.
struct Diagnostic {
  std::string code;
  std::string message;
  double residual = 0.0;
};

/// Outcome-labelled set of positive effects summing to identity.
struct Povm {
  Index dim = 0;
  std::vector<std::string> outcomes;
  std::vector<ComplexMatrix> effects;

  Index size() const { return static_cast<Index>(outcomes.size()); }
  Index outcome_index(const std::string& label) const;
};

/// Row-stochastic postprocessing matrix with explicit label binding.
struct StochasticMatrix {
  std::vector<std::string> rows;  // source outcomes
  std::vector<std::string> cols;  // target outcomes
  RealMatrix matrix;

  static StochasticMatrix identity(const std::vector<std::string>& labels);
};

/// Kraus operators of one outcome's quantum operation. An empty list is the
/// zero operation; it is kept explicit rather than dropped so that dead
/// branches of a decomposition stay visible.
using KrausList = std::vector<ComplexMatrix>;

/// Outcome-labelled set of quantum operations whose sum is trace preserving.
struct Instrument {
  Index dim_in = 0;
  Index dim_out = 0;
  std::vector<std::string> outcomes;
  std::vector<KrausList> operations;

  Index size() const { return static_cast<Index>(outcomes.size()); }
  Index outcome_index(const std::string& label) const;
  bool is_zero_operation(Index i) const { return operations[i].empty(); }
};

/// One step of an adaptive sequence: the instrument actually applied is
/// selected by the outcome of the previous step.
struct AdaptiveStep {
  Index dim_out = 0;                    // dimension this step maps into
  std::vector<std::string> keys;        // previous-step outcome labels
  std::vector<Instrument> instruments;  // parallel to keys

  const Instrument& instrument_for(const std::string& key) const;
};

/// N-step adaptive sequence of instruments. Step 1 is keyed by the singleton
/// outcome "1".
struct AdaptiveSequence {
  Index dim0 = 0;
  std::vector<AdaptiveStep> steps;

  Index num_steps() const { return static_cast<Index>(steps.size()); }
  /// d_0, ..., d_N
  std::vector<Index> dims() const;
  /// Outcome labels of step k (1-based).
  const std::vector<std::string>& outcomes_at_step(Index k) const;
  const std::vector<std::string>& final_outcomes() const;
};

struct DensityMatrix {
  ComplexMatrix rho;
};

std::vector<Diagnostic> validate(const Povm& povm, double tol = kDefaultTol);
std::vector<Diagnostic> validate(const StochasticMatrix& nu,
                                 double tol = kDefaultTol);
std::vector<Diagnostic> validate(const Instrument& ins,
                                 double tol = kDefaultTol);
std::vector<Diagnostic> validate(const AdaptiveSequence& asi,
                                 double tol = kDefaultTol);
std::vector<Diagnostic> validate(const DensityMatrix& state,
                                 double tol = kDefaultTol);

/// Effect of one operation, sum_m T^dagger T.
ComplexMatrix induced_effect(const KrausList& ops, Index dim_in);

/// POVM with the same outcomes whose probabilities reproduce the instrument's.
Povm induced_povm(const Instrument& ins);

/// Induced channel: all operations summed into a single Kraus list.
KrausList induced_channel(const Instrument& ins);

struct ApplyResult {
  ComplexMatrix state;  // unnormalized
  double probability = 0.0;
};

ApplyResult apply(const KrausList& ops, const ComplexMatrix& rho);
ApplyResult apply_channel(const Instrument& ins, const ComplexMatrix& rho);

/// Lueders instrument of a POVM: one Kraus operator sqrt(A_i) per outcome.
/// Numerically zero effects produce explicit zero operations.
Instrument luders(const Povm& povm, double tol = kDefaultTol);

/// POVM viewed as an instrument with one-dimensional output: outcome k holds
/// the Kraus rows sqrt(lambda_m) <v_m| of the spectral decomposition of A_k.
Instrument povm_as_instrument(const Povm& povm, double tol = kDefaultTol);

/// B_j = sum_k nu_kj A_k. Rows of nu must match the POVM outcomes.
Povm postprocess_povm(const Povm& povm, const StochasticMatrix& nu);

/// Detailed refinement: every Kraus operator of a minimal representation
/// becomes its own outcome. coarse_map[i] is the original outcome label of
/// detailed outcome i.
struct DetailedInstrument {
  Instrument instrument;
  std::vector<std::string> coarse_map;
};

DetailedInstrument detailed_instrument(const Instrument& ins,
                                       double tol = kDefaultTol);

/// Inverse of the detailed refinement: groups outcomes of `fine` by
/// `coarse_map` onto `target_outcomes`, concatenating Kraus lists.
Instrument coarse_grain(const Instrument& fine,
                        const std::vector<std::string>& coarse_map,
                        const std::vector<std::string>& target_outcomes);

/// second after first; outcomes are the cartesian product joined with ",".
Instrument compose(const Instrument& first, const Instrument& second);

/// Unnormalized Choi matrix C = sum_ab N(|a><b|) (x) |a><b|, assembled as
/// sum_m f_m f_m^dagger over row-major flattened Kraus operators, so that the
/// Kraus rank of the operation equals the matrix rank of C.
ComplexMatrix choi(const KrausList& ops, Index dim_in, Index dim_out);

/// Minimal Kraus representation recovered from a Choi matrix.
KrausList kraus_from_choi(const ComplexMatrix& c, Index dim_in, Index dim_out,
                          double tol = kDefaultTol);

/// Frobenius distance between Choi matrices; zero iff the operations agree.
double choi_distance(const KrausList& a, const KrausList& b, Index dim_in,
                     Index dim_out);

/// Frobenius norm of the Choi matrix (distance to the zero operation).
double choi_norm(const KrausList& ops, Index dim_in, Index dim_out);

/// Minimal Kraus rank of one operation (= rank of its Choi matrix).
Index kraus_rank(const KrausList& ops, Index dim_in, Index dim_out,
                 double tol = kDefaultTol);

/// Sum of the minimal Kraus ranks over all outcomes.
Index total_kraus_rank(const Instrument& ins, double tol = kDefaultTol);

/// Superoperator with row-major vec convention: vec(K rho K^dagger) =
/// S vec(rho). Composition of operations is the product of superoperators.
ComplexMatrix superoperator(const KrausList& ops, Index dim_in, Index dim_out);

/// Index reshuffle from superoperator to the Choi convention above.
ComplexMatrix choi_from_superoperator(const ComplexMatrix& s, Index dim_in,
                                      Index dim_out);

/// Joins tuple components into an outcome label ("a,b,c").
std::string join_labels(const std::vector<std::string>& parts);

/// Splits an outcome label at "," into tuple components.
std::vector<std::string> split_label(const std::string& label);

}  // namespace iqseq
