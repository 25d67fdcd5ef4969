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

#include "iqseq/resources.hpp"

#include <cmath>
#include <stdexcept>

namespace iqseq {

namespace {

Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

Index round_up_multiple(Index value, Index factor) {
  return ceil_div(value, factor) * factor;
}

Index qubits_for(Index dim) {
  Index q = 0;
  Index cap = 1;
  while (cap < dim) {
    cap *= 2;
    ++q;
  }
  return q;
}

std::vector<Index> minimal_ranks(const Instrument& ins, double tol) {
  std::vector<Index> ranks;
  for (const KrausList& ops : ins.operations)
    ranks.push_back(kraus_rank(ops, ins.dim_in, ins.dim_out, tol));
  return ranks;
}

void fill_bounds(ResourceReport& r) {
  r.ancilla_qubits = qubits_for(r.ancilla_dim);
  r.tradeoff_bound = std::log2(static_cast<double>(r.g * r.total_rank));
  r.min_steps_bound =
      r.ancilla_dim > 1
          ? std::log2(static_cast<double>(r.g * r.total_rank)) /
                std::log2(static_cast<double>(r.ancilla_dim))
          : 0.0;
  r.step_ancilla.clear();
  for (std::size_t k = 1; k < r.dims.size(); ++k)
    r.step_ancilla.push_back(r.dims[0] * r.ancilla_dim / r.dims[k]);
  r.rank_bound = rank_upper_bound(
      r.ancilla_dim, r.dims[0],
      std::vector<Index>(r.dims.begin() + 1, r.dims.end()));
  r.rank_bound_satisfied = r.total_rank <= r.rank_bound;
  r.tradeoff_satisfied =
      static_cast<double>(r.steps * r.ancilla_qubits) >=
      r.tradeoff_bound - 1e-9;
}

}  // namespace

Index dimension_factor(Index dim_in, Index dim_out) {
  if (dim_in <= 0 || dim_out <= 0)
    throw std::invalid_argument("dimensions must be positive");
  return ceil_div(dim_out, dim_in);
}

Index ancilla_dimension(const Instrument& target, const StochasticMatrix& nu,
                        double tol) {
  if (target.dim_in > target.dim_out)
    throw std::domain_error(
        "no closed ancilla formula in the shrinking case");
  const Index g = dimension_factor(target.dim_in, target.dim_out);
  const std::vector<Index> ranks = minimal_ranks(target, tol);

  Index d_a = g * ceil_div(static_cast<Index>(nu.cols.size()), g);
  for (std::size_t j = 0; j < nu.cols.size(); ++j) {
    Index m_j = 0;
    for (std::size_t k = 0; k < nu.rows.size(); ++k)
      if (nu.matrix(k, j) > 0.0)
        m_j += ranks[target.outcome_index(nu.rows[k])];
    d_a = std::max(d_a, g * m_j);
  }
  return d_a;
}

Index minimal_ancilla_two_step(Index r_t, Index g) {
  return minimal_ancilla_n_step(r_t, g, 2);
}

Index minimal_ancilla_n_step(Index r_t, Index g, Index n) {
  if (r_t < 1 || g < 1 || n < 1)
    throw std::invalid_argument("arguments must be at least 1");
  // Smallest t with (g t)^n >= g r_t, so d_A = g t.
  for (Index t = 1;; ++t) {
    Index power = 1;
    bool reached = false;
    for (Index i = 0; i < n; ++i) {
      power *= g * t;
      if (power >= g * r_t) {
        reached = true;
        break;
      }
    }
    if (reached || power >= g * r_t) return g * t;
  }
}

Index min_steps(Index r_t, Index g, Index d_a) {
  if (r_t < 1 || g < 1) throw std::invalid_argument("arguments must be >= 1");
  if (d_a < g)
    throw std::domain_error("ancilla dimension below the dimension factor");
  // Smallest N with d_A^N >= g r_T.
  Index power = 1;
  for (Index n = 1; n <= 64; ++n) {
    power *= d_a;
    if (power >= g * r_t) return n;
    if (d_a == 1)
      throw std::domain_error("one-dimensional ancilla cannot realize rank > 1");
  }
  throw std::domain_error("step count overflow");
}

double tradeoff_bound(Index r_t, Index g) {
  if (r_t < 1 || g < 1) throw std::invalid_argument("arguments must be >= 1");
  return std::log2(static_cast<double>(g * r_t));
}

Index rank_upper_bound(Index d_a, Index d0,
                       const std::vector<Index>& step_dims) {
  if (d_a < 1 || d0 < 1) throw std::invalid_argument("dimensions must be >= 1");
  Index bound = 1;
  for (Index dk : step_dims) {
    if (dk < 1) throw std::invalid_argument("dimensions must be >= 1");
    bound *= (d0 * d_a) / dk;
  }
  return bound;
}

PartitionPlan optimal_partition(Index r_t, Index g) {
  if (r_t < 1 || g < 1) throw std::invalid_argument("arguments must be >= 1");
  Index best_n = 1;
  Index best = g * std::max(ceil_div(Index(1), g), r_t);
  for (Index n = 1; n <= r_t; ++n) {
    const Index d = g * std::max(ceil_div(n, g), ceil_div(r_t, n));
    if (d < best) {
      best = d;
      best_n = n;
    }
  }
  PartitionPlan plan;
  plan.ancilla_dim = best;
  const Index base = r_t / best_n;
  const Index extra = r_t % best_n;
  for (Index i = 0; i < best_n; ++i)
    plan.sizes.push_back(base + (i < extra ? 1 : 0));
  return plan;
}

namespace {

// Walks all restricted growth strings (= set partitions of labeled items).
void enumerate_partitions(Index item, Index used_groups,
                          std::vector<Index>& sizes, Index total, Index g,
                          Index& best) {
  if (item == total) {
    Index largest = 0;
    for (Index s : sizes) largest = std::max(largest, s);
    const Index d =
        g * std::max(ceil_div(static_cast<Index>(sizes.size()), g), largest);
    best = std::min(best, d);
    return;
  }
  for (Index grp = 0; grp <= used_groups; ++grp) {
    if (grp == used_groups) {
      sizes.push_back(1);
      enumerate_partitions(item + 1, used_groups + 1, sizes, total, g, best);
      sizes.pop_back();
    } else {
      ++sizes[grp];
      enumerate_partitions(item + 1, used_groups, sizes, total, g, best);
      --sizes[grp];
    }
  }
}

}  // namespace

Index exhaustive_partition_oracle(Index r_t, Index g) {
  if (r_t < 1 || g < 1) throw std::invalid_argument("arguments must be >= 1");
  if (r_t > 12)
    throw std::invalid_argument(
        "partition oracle refuses r_T > 12 (combinatorial blow-up)");
  Index best = g * std::max(Index(1), r_t);
  std::vector<Index> sizes;
  enumerate_partitions(0, 0, sizes, r_t, g, best);
  return best;
}

StochasticMatrix argmax_coarse_graining(const StochasticMatrix& nu) {
  StochasticMatrix out;
  out.rows = nu.rows;
  out.cols = nu.cols;
  out.matrix = RealMatrix::Zero(nu.matrix.rows(), nu.matrix.cols());
  for (Index k = 0; k < nu.matrix.rows(); ++k) {
    Index best = 0;
    for (Index j = 1; j < nu.matrix.cols(); ++j)
      if (nu.matrix(k, j) > nu.matrix(k, best)) best = j;
    out.matrix(k, best) = 1.0;
  }
  return out;
}

ResourceReport two_step_report(const Instrument& target,
                               const TwoStepDecomposition& dec, double tol) {
  ResourceReport r;
  r.g = dimension_factor(target.dim_in, target.dim_out);
  r.ranks = minimal_ranks(target, tol);
  for (Index rk : r.ranks) r.total_rank += rk;
  r.steps = 2;
  r.dims = {target.dim_in, dec.intermediate_dim, target.dim_out};

  const Index n_b = static_cast<Index>(dec.postproc.cols.size());
  Index d_a = r.g * ceil_div(n_b, r.g);
  for (Index j = 0; j < n_b; ++j) {
    Index m_j = dec.additional_kraus[j];
    for (Index k = 0; k < target.size(); ++k)
      if (dec.postproc.matrix(k, j) > 0.0) m_j += r.ranks[k];
    r.m.push_back(m_j);
    d_a = std::max(d_a, r.g * m_j);
  }
  r.ancilla_dim = d_a;
  fill_bounds(r);
  return r;
}

ResourceReport asi_report(const AdaptiveSequence& asi, const Instrument& total,
                          double tol) {
  ResourceReport r;
  r.dims = asi.dims();
  r.steps = asi.num_steps();
  r.g = dimension_factor(r.dims.front(), r.dims.back());
  r.ranks = minimal_ranks(total, tol);
  for (Index rk : r.ranks) r.total_rank += rk;

  Index need = r.g;
  Index dim_prev = asi.dim0;
  for (const AdaptiveStep& step : asi.steps) {
    const Index g_k = dimension_factor(dim_prev, step.dim_out);
    const bool expanding = step.dim_out > dim_prev;
    for (const Instrument& ins : step.instruments) {
      Index rank_sum = 0;
      for (const KrausList& ops : ins.operations)
        rank_sum += kraus_rank(ops, ins.dim_in, ins.dim_out, tol);
      need = std::max(need, expanding ? g_k * rank_sum : rank_sum);
      if (&step == &asi.steps.back()) r.m.push_back(rank_sum);
    }
    dim_prev = step.dim_out;
  }
  r.ancilla_dim = round_up_multiple(need, r.g);
  fill_bounds(r);
  return r;
}

}  // namespace iqseq
