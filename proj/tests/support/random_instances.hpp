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

// Seeded generators for random quantum objects used across the test suites.

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "iqseq/quantum.hpp"
#include "iqseq/runtime.hpp"

namespace iqseq::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(SplitMix64::scramble(seed)) {}

  double uniform() { return gen_.next_double(); }

  double normal() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex cnormal() { return {normal(), normal()}; }

  Index pick(Index lo, Index hi) {  // inclusive
    return lo + static_cast<Index>(uniform() * static_cast<double>(hi - lo + 1));
  }

 private:
  SplitMix64 gen_;
};

inline ComplexMatrix random_matrix(Rng& rng, Index rows, Index cols) {
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.cnormal();
  return m;
}

inline ComplexMatrix random_psd(Rng& rng, Index n, Index rank = -1) {
  if (rank < 0) rank = n;
  const ComplexMatrix g = random_matrix(rng, n, rank);
  return hermitize(g * g.adjoint());
}

inline ComplexMatrix random_hermitian(Rng& rng, Index n) {
  return hermitize(random_matrix(rng, n, n));
}

inline ComplexMatrix random_unitary(Rng& rng, Index n) {
  const Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, n, n));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

inline DensityMatrix random_state(Rng& rng, Index n) {
  ComplexMatrix rho = random_psd(rng, n);
  rho /= rho.trace().real();
  return {hermitize(rho)};
}

inline std::vector<std::string> numbered_labels(Index count) {
  std::vector<std::string> labels;
  for (Index i = 0; i < count; ++i) labels.push_back(std::to_string(i));
  return labels;
}

/// Valid POVM with the requested number of outcomes; effect ranks are
/// generically full unless `rank` limits them.
inline Povm random_povm(Rng& rng, Index dim, Index outcomes, Index rank = -1) {
  std::vector<ComplexMatrix> parts;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (Index i = 0; i < outcomes; ++i) {
    parts.push_back(random_psd(rng, dim, rank));
    sum += parts.back();
  }
  const ComplexMatrix norm = matrix_power(sum, -0.5);
  Povm povm;
  povm.dim = dim;
  povm.outcomes = numbered_labels(outcomes);
  for (const ComplexMatrix& p : parts)
    povm.effects.push_back(hermitize(norm * p * norm));
  return povm;
}

/// Valid instrument with the requested Kraus counts per outcome (zero counts
/// give explicit zero operations). Requires enough total rank to resolve the
/// identity, i.e. sum(ranks) * dim_out >= dim_in.
inline Instrument random_instrument(Rng& rng, Index dim_in, Index dim_out,
                                    const std::vector<Index>& ranks) {
  std::vector<std::vector<ComplexMatrix>> raw(ranks.size());
  ComplexMatrix sum = ComplexMatrix::Zero(dim_in, dim_in);
  for (std::size_t k = 0; k < ranks.size(); ++k)
    for (Index m = 0; m < ranks[k]; ++m) {
      raw[k].push_back(random_matrix(rng, dim_out, dim_in));
      sum += raw[k].back().adjoint() * raw[k].back();
    }
  const ComplexMatrix norm = matrix_power(hermitize(sum), -0.5);

  Instrument ins;
  ins.dim_in = dim_in;
  ins.dim_out = dim_out;
  ins.outcomes = numbered_labels(static_cast<Index>(ranks.size()));
  for (auto& ops : raw) {
    KrausList normalized;
    for (ComplexMatrix& k : ops) normalized.push_back(k * norm);
    ins.operations.push_back(std::move(normalized));
  }
  return ins;
}

/// Row-stochastic matrix over the given row labels; `zero_fraction` of the
/// entries vanish exactly (every row keeps at least one live column).
inline StochasticMatrix random_stochastic(Rng& rng,
                                          const std::vector<std::string>& rows,
                                          Index cols,
                                          double zero_fraction = 0.3) {
  StochasticMatrix nu;
  nu.rows = rows;
  nu.cols = numbered_labels(cols);
  nu.matrix.resize(rows.size(), cols);
  for (Index k = 0; k < static_cast<Index>(rows.size()); ++k) {
    double sum = 0.0;
    for (Index j = 0; j < cols; ++j) {
      const bool zero = rng.uniform() < zero_fraction;
      nu.matrix(k, j) = zero ? 0.0 : 0.1 + rng.uniform();
      sum += nu.matrix(k, j);
    }
    if (sum == 0.0) {
      nu.matrix(k, rng.pick(0, cols - 1)) = 1.0;
      sum = 1.0;
    }
    nu.matrix.row(k) /= sum;
  }
  return nu;
}

/// 0/1 coarse-graining over the rows (every row assigned to a random column).
inline StochasticMatrix random_coarse_graining(
    Rng& rng, const std::vector<std::string>& rows, Index cols) {
  StochasticMatrix nu;
  nu.rows = rows;
  nu.cols = numbered_labels(cols);
  nu.matrix = RealMatrix::Zero(rows.size(), cols);
  for (Index k = 0; k < static_cast<Index>(rows.size()); ++k)
    nu.matrix(k, rng.pick(0, cols - 1)) = 1.0;
  return nu;
}

}  // namespace iqseq::testing
