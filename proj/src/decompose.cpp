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

#include "iqseq/decompose.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace iqseq {

namespace {

Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

void require_valid(const Instrument& ins, const char* what, double tol) {
  const auto diags = validate(ins, tol);
  if (!diags.empty())
    throw std::invalid_argument(std::string(what) + ": " + diags[0].code +
                                " (" + diags[0].message + ")");
}

void require_valid(const StochasticMatrix& nu, double tol) {
  const auto diags = validate(nu, tol);
  if (!diags.empty())
    throw std::invalid_argument("postprocessing matrix: " + diags[0].code +
                                " (" + diags[0].message + ")");
}

// Reorders the rows of nu to the given outcome order; every outcome must be
// covered exactly once.
StochasticMatrix align_rows(const StochasticMatrix& nu,
                            const std::vector<std::string>& outcomes) {
  if (nu.rows.size() != outcomes.size())
    throw std::invalid_argument(
        "postprocessing rows do not cover the instrument outcomes");
  StochasticMatrix out;
  out.rows = outcomes;
  out.cols = nu.cols;
  out.matrix.resize(outcomes.size(), nu.cols.size());
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    bool found = false;
    for (std::size_t r = 0; r < nu.rows.size(); ++r) {
      if (nu.rows[r] == outcomes[k]) {
        out.matrix.row(k) = nu.matrix.row(r);
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("postprocessing matrix misses outcome " +
                                  outcomes[k]);
  }
  return out;
}

// Support data of one intermediate POVM effect, all derived from a single
// eigendecomposition so the construction is deterministic.
struct EffectSupport {
  Index rank = 0;
  ComplexMatrix projector;     // Pi_j
  ComplexMatrix inv_sqrt;      // B_j^{-1/2} (pseudo-inverse convention)
  ComplexMatrix sqrt;          // B_j^{1/2}
  ComplexMatrix kernel_basis;  // orthonormal columns spanning ker B_j
  ComplexMatrix range_basis;   // orthonormal columns spanning supp B_j
};

EffectSupport effect_support(const ComplexMatrix& b, double tol) {
  const Spectrum spec = spectral_decomposition(b, tol);
  const Index n = b.rows();
  const double scale =
      spec.eigenvalues.size() > 0 ? spec.eigenvalues.cwiseAbs().maxCoeff() : 0;
  if (spec.eigenvalues.size() > 0 && spec.eigenvalues(n - 1) < -tol * scale)
    throw std::domain_error("intermediate POVM effect is not PSD");

  EffectSupport out;
  out.rank = spec.rank();
  out.range_basis = spec.eigenvectors.leftCols(out.rank);
  out.kernel_basis = spec.eigenvectors.rightCols(n - out.rank);
  out.projector = hermitize(out.range_basis * out.range_basis.adjoint());
  out.inv_sqrt = ComplexMatrix::Zero(n, n);
  out.sqrt = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < out.rank; ++i) {
    const double lambda = spec.eigenvalues(i);
    const ComplexMatrix vv =
        spec.eigenvectors.col(i) * spec.eigenvectors.col(i).adjoint();
    out.inv_sqrt += (1.0 / std::sqrt(lambda)) * vv;
    out.sqrt += std::sqrt(lambda) * vv;
  }
  out.inv_sqrt = hermitize(out.inv_sqrt);
  out.sqrt = hermitize(out.sqrt);
  return out;
}

// First dim_in columns of the identity on the output space.
ComplexMatrix standard_embedding(Index dim_in, Index dim_out) {
  return ComplexMatrix::Identity(dim_out, dim_out).leftCols(dim_in);
}

PathWeights default_weights(const Instrument& target,
                            const StochasticMatrix& aligned) {
  const Index cols = static_cast<Index>(aligned.cols.size());
  PathWeights weights(cols);
  for (Index j = 0; j < cols; ++j) {
    weights[j].resize(target.size());
    bool placed = false;
    for (Index k = 0; k < target.size(); ++k) {
      weights[j][k] =
          ComplexVector::Zero(target.operations[k].size());
      if (!placed && aligned.matrix(k, j) > 0.0 &&
          !target.operations[k].empty()) {
        weights[j][k](0) = 1.0;
        placed = true;
      }
    }
  }
  return weights;
}

void check_weights_shape(const PathWeights& weights, const Instrument& target,
                         Index cols) {
  if (static_cast<Index>(weights.size()) != cols)
    throw std::invalid_argument("path weights: wrong outcome count");
  for (const auto& per_k : weights) {
    if (static_cast<Index>(per_k.size()) != target.size())
      throw std::invalid_argument("path weights: wrong row count");
    for (Index k = 0; k < target.size(); ++k)
      if (per_k[k].size() !=
          static_cast<Index>(target.operations[k].size()))
        throw std::invalid_argument("path weights: wrong Kraus count");
  }
}

// Fills the missing part of the residual normalization when the output space
// cannot hold the whole complement: leftover image capacity of the existing
// operators is used first (largest capacity first), the remainder is packed
// into new operators of rank <= dim_out on outcome k0. Returns the number of
// operators added.
Index complete_on_complement(std::vector<KrausList>& ops,
                             const std::vector<std::pair<Index, Index>>& cores,
                             const ComplexMatrix& kernel, Index dim_out,
                             Index k0, const AuxInstrumentPolicy& policy,
                             double tol) {
  const Index s = kernel.cols();
  if (s == 0) return 0;
  Index next = 0;

  if (policy.absorb_into_existing) {
    struct Slot {
      Index order;
      Index k;
      Index pos;
      Index capacity;
      ComplexMatrix complement;  // orthonormal basis of Im(core)^perp
    };
    std::vector<Slot> slots;
    for (std::size_t t = 0; t < cores.size(); ++t) {
      const auto [k, pos] = cores[t];
      const Svd sv = svd(ops[k][pos], tol);
      const Index capacity = dim_out - sv.rank();
      if (capacity <= 0) continue;
      const ComplexMatrix full = complete_basis(sv.left, dim_out);
      slots.push_back({static_cast<Index>(t), k, pos, capacity,
                       full.rightCols(capacity)});
    }
    std::stable_sort(slots.begin(), slots.end(),
                     [](const Slot& a, const Slot& b) {
                       if (a.capacity != b.capacity)
                         return a.capacity > b.capacity;
                       return a.order < b.order;
                     });
    for (const Slot& slot : slots) {
      if (next >= s) break;
      const Index take = std::min<Index>(slot.capacity, s - next);
      ComplexMatrix w = ComplexMatrix::Zero(dim_out, kernel.rows());
      for (Index u = 0; u < take; ++u)
        w += slot.complement.col(u) * kernel.col(next + u).adjoint();
      ops[slot.k][slot.pos] += w;
      next += take;
    }
  }

  Index added = 0;
  while (next < s) {
    const Index take = std::min<Index>(dim_out, s - next);
    ComplexMatrix w = ComplexMatrix::Zero(dim_out, kernel.rows());
    for (Index u = 0; u < take; ++u)
      w += ComplexMatrix::Identity(dim_out, dim_out).col(u) *
           kernel.col(next + u).adjoint();
    ops[k0].push_back(std::move(w));
    next += take;
    ++added;
  }
  return added;
}

Index first_live_outcome(const StochasticMatrix& aligned, Index j) {
  for (Index k = 0; k < aligned.matrix.rows(); ++k)
    if (aligned.matrix(k, j) > 0.0) return k;
  return 0;
}

}  // namespace

AdaptiveSequence TwoStepDecomposition::as_asi() const {
  AdaptiveSequence asi;
  asi.dim0 = initial.dim_in;
  AdaptiveStep first;
  first.dim_out = intermediate_dim;
  first.keys = {"1"};
  first.instruments = {initial};
  AdaptiveStep second;
  second.dim_out = residuals.at(0).dim_out;
  second.keys = postproc.cols;
  second.instruments = residuals;
  asi.steps = {std::move(first), std::move(second)};
  return asi;
}

TwoStepDecomposition two_step(const Instrument& target,
                              const StochasticMatrix& nu,
                              const std::optional<PathWeights>& weights,
                              double tol, const AuxInstrumentPolicy& policy) {
  require_valid(target, "target instrument", tol);
  require_valid(nu, tol);
  const StochasticMatrix aligned = align_rows(nu, target.outcomes);
  if (aligned.cols.empty())
    throw std::invalid_argument("postprocessing matrix has no outcomes");

  const Index d_in = target.dim_in;
  const Index d_out = target.dim_out;
  const Index n_b = static_cast<Index>(aligned.cols.size());

  const Povm induced = induced_povm(target);
  const Povm b = postprocess_povm(induced, aligned);

  TwoStepDecomposition dec;
  dec.initial = luders(b, tol);
  dec.postproc = aligned;
  dec.intermediate_dim = d_in;
  dec.additional_kraus.assign(n_b, 0);

  PathWeights used =
      weights ? *weights : default_weights(target, aligned);
  check_weights_shape(used, target, n_b);

  // Per-pair isometries V_{k,m} used by the non-shrinking completion: singular
  // bases of the target Kraus operators extended over the standard basis.
  std::vector<std::vector<ComplexMatrix>> isometry(target.size());
  const bool growing = d_in <= d_out;
  if (growing) {
    for (Index k = 0; k < target.size(); ++k) {
      for (const ComplexMatrix& t : target.operations[k]) {
        const Svd sv = svd(t, tol);
        const ComplexMatrix right_full = complete_basis(sv.right, d_in);
        const ComplexMatrix left_full = complete_basis(sv.left, d_out);
        isometry[k].push_back(left_full.leftCols(d_in) * right_full.adjoint());
      }
    }
  }

  for (Index j = 0; j < n_b; ++j) {
    const EffectSupport sup = effect_support(b.effects[j], tol);
    const Index missing = d_in - sup.rank;

    std::vector<KrausList> ops(target.size());
    std::vector<std::pair<Index, Index>> core_pos;
    for (Index k = 0; k < target.size(); ++k) {
      const double nu_kj = aligned.matrix(k, j);
      if (nu_kj <= 0.0) continue;
      for (std::size_t m = 0; m < target.operations[k].size(); ++m) {
        ComplexMatrix core = std::sqrt(nu_kj) *
                             (target.operations[k][m] * sup.inv_sqrt);
        core_pos.emplace_back(k, static_cast<Index>(ops[k].size()));
        ops[k].push_back(std::move(core));
      }
    }

    if (missing > 0) {
      if (growing) {
        double norm2 = 0.0;
        for (Index k = 0; k < target.size(); ++k)
          norm2 += used[j][k].squaredNorm();
        if (norm2 < 0.5 && core_pos.empty()) {
          // Dead intermediate outcome: the branch is never selected, but the
          // residual must still be a valid instrument.
          ops[0].push_back(standard_embedding(d_in, d_out));
          dec.additional_kraus[j] = 1;
        } else {
          if (std::abs(norm2 - 1.0) > 1e-6)
            throw std::invalid_argument(
                "path weights must have unit square sum for outcome " +
                aligned.cols[j]);
          const ComplexMatrix complement =
              ComplexMatrix::Identity(d_in, d_in) - sup.projector;
          for (Index k = 0; k < target.size(); ++k) {
            Index pos = 0;
            const bool live = aligned.matrix(k, j) > 0.0;
            for (std::size_t m = 0; m < target.operations[k].size(); ++m) {
              const Complex c = used[j][k](m);
              if (std::abs(c) > 0.0) {
                const ComplexMatrix term = c * (isometry[k][m] * complement);
                if (live)
                  ops[k][pos] += term;
                else
                  ops[k].push_back(term);
              }
              if (live) ++pos;
            }
          }
        }
      } else {
        dec.additional_kraus[j] = complete_on_complement(
            ops, core_pos, sup.kernel_basis, d_out,
            first_live_outcome(aligned, j), policy, tol);
      }
    }

    Instrument residual;
    residual.dim_in = d_in;
    residual.dim_out = d_out;
    residual.outcomes = target.outcomes;
    residual.operations = std::move(ops);
    dec.residuals.push_back(std::move(residual));
  }

  dec.weights = std::move(used);
  return dec;
}

Index count_additional_kraus(const Instrument& target,
                             const StochasticMatrix& nu,
                             const std::string& j_label, double tol) {
  if (target.dim_in <= target.dim_out) return 0;
  const StochasticMatrix aligned = align_rows(nu, target.outcomes);
  Index j = -1;
  for (std::size_t c = 0; c < aligned.cols.size(); ++c)
    if (aligned.cols[c] == j_label) j = static_cast<Index>(c);
  if (j < 0)
    throw std::invalid_argument("unknown postprocessing outcome: " + j_label);

  const Povm b = postprocess_povm(induced_povm(target), aligned);
  const EffectSupport sup = effect_support(b.effects[j], tol);
  const Index missing = target.dim_in - sup.rank;
  if (missing == 0) return 0;

  Index capacity = 0;
  for (Index k = 0; k < target.size(); ++k) {
    if (aligned.matrix(k, j) <= 0.0) continue;
    for (const ComplexMatrix& t : target.operations[k])
      capacity += target.dim_out - svd(t, tol).rank();
  }
  if (capacity >= missing) return 0;
  return ceil_div(missing - capacity, target.dim_out);
}

TwoStepDecomposition two_step_reduced(const Instrument& target,
                                      const StochasticMatrix& nu, double tol,
                                      const AuxInstrumentPolicy& policy) {
  require_valid(target, "target instrument", tol);
  require_valid(nu, tol);
  const StochasticMatrix aligned = align_rows(nu, target.outcomes);
  if (aligned.cols.empty())
    throw std::invalid_argument("postprocessing matrix has no outcomes");

  const Index d_in = target.dim_in;
  const Index d_out = target.dim_out;
  const Index n_b = static_cast<Index>(aligned.cols.size());
  const Povm b = postprocess_povm(induced_povm(target), aligned);

  std::vector<EffectSupport> sup;
  Index d1 = 0;
  for (Index j = 0; j < n_b; ++j) {
    sup.push_back(effect_support(b.effects[j], tol));
    d1 = std::max(d1, sup.back().rank);
  }
  if (d1 >= d_in)
    throw std::domain_error(
        "every intermediate effect would need the full input space; use the "
        "unreduced two-step construction");

  TwoStepDecomposition dec;
  dec.postproc = aligned;
  dec.intermediate_dim = d1;
  dec.additional_kraus.assign(n_b, 0);

  // Initial instrument with Kraus K_j = M_j sqrt(B_j), where M_j maps the
  // support of B_j onto the first rank(B_j) coordinates of the intermediate
  // space.
  dec.initial.dim_in = d_in;
  dec.initial.dim_out = d1;
  dec.initial.outcomes = aligned.cols;
  std::vector<ComplexMatrix> embed;  // M_j, d1 x d_in
  for (Index j = 0; j < n_b; ++j) {
    ComplexMatrix m = ComplexMatrix::Zero(d1, d_in);
    for (Index i = 0; i < sup[j].rank; ++i)
      m.row(i) = sup[j].range_basis.col(i).adjoint();
    embed.push_back(m);
    if (sup[j].rank == 0)
      dec.initial.operations.emplace_back();
    else
      dec.initial.operations.push_back({embed[j] * sup[j].sqrt});
  }

  const bool growing = d1 <= d_out;
  for (Index j = 0; j < n_b; ++j) {
    std::vector<KrausList> ops(target.size());
    std::vector<std::pair<Index, Index>> core_pos;
    std::vector<std::pair<Index, Index>> pair_of_core;  // (k, m) per core
    for (Index k = 0; k < target.size(); ++k) {
      const double nu_kj = aligned.matrix(k, j);
      if (nu_kj <= 0.0) continue;
      for (std::size_t m = 0; m < target.operations[k].size(); ++m) {
        ComplexMatrix core = std::sqrt(nu_kj) * (target.operations[k][m] *
                                                 sup[j].inv_sqrt *
                                                 embed[j].adjoint());
        core_pos.emplace_back(k, static_cast<Index>(ops[k].size()));
        pair_of_core.emplace_back(k, static_cast<Index>(m));
        ops[k].push_back(std::move(core));
      }
    }

    const Index missing = d1 - sup[j].rank;
    if (missing > 0) {
      // Complement of M_j M_j^dagger: the last d1 - rank coordinates.
      ComplexMatrix kernel = ComplexMatrix::Zero(d1, missing);
      for (Index i = 0; i < missing; ++i) kernel(sup[j].rank + i, i) = 1.0;

      if (core_pos.empty()) {
        if (growing) {
          ops[0].push_back(standard_embedding(d1, d_out));
          dec.additional_kraus[j] = 1;
        } else {
          dec.additional_kraus[j] = complete_on_complement(
              ops, {}, kernel, d_out, 0, policy, tol);
        }
      } else if (growing) {
        // Weighted isometry completion as in the unreduced case, with the
        // singular bases taken from the composed residual operators.
        const ComplexMatrix complement =
            ComplexMatrix::Identity(d1, d1) -
            hermitize(embed[j] * sup[j].projector * embed[j].adjoint());
        const auto [k0, pos0] = core_pos.front();
        const Svd sv = svd(ops[k0][pos0], tol);
        const ComplexMatrix right_full = complete_basis(sv.right, d1);
        const ComplexMatrix left_full = complete_basis(sv.left, d_out);
        const ComplexMatrix v = left_full.leftCols(d1) * right_full.adjoint();
        ops[k0][pos0] += v * complement;
      } else {
        dec.additional_kraus[j] = complete_on_complement(
            ops, core_pos, kernel, d_out, first_live_outcome(aligned, j),
            policy, tol);
      }
    }

    Instrument residual;
    residual.dim_in = d1;
    residual.dim_out = d_out;
    residual.outcomes = target.outcomes;
    residual.operations = std::move(ops);
    dec.residuals.push_back(std::move(residual));
  }
  return dec;
}

AdaptiveSequence n_step(const Instrument& target,
                        const std::vector<StochasticMatrix>& chain,
                        double tol) {
  if (chain.empty()) {
    AdaptiveSequence asi;
    asi.dim0 = target.dim_in;
    AdaptiveStep only;
    only.dim_out = target.dim_out;
    only.keys = {"1"};
    only.instruments = {target};
    asi.steps = {std::move(only)};
    return asi;
  }

  std::vector<AdaptiveStep> steps_reversed;
  Instrument current = target;
  for (const StochasticMatrix& link : chain) {
    TwoStepDecomposition dec = two_step(current, link, std::nullopt, tol);
    AdaptiveStep step;
    step.dim_out = current.dim_out;
    step.keys = dec.postproc.cols;
    step.instruments = std::move(dec.residuals);
    steps_reversed.push_back(std::move(step));
    current = std::move(dec.initial);
  }
  AdaptiveStep first;
  first.dim_out = current.dim_out;
  first.keys = {"1"};
  first.instruments = {std::move(current)};
  steps_reversed.push_back(std::move(first));

  AdaptiveSequence asi;
  asi.dim0 = target.dim_in;
  asi.steps.assign(steps_reversed.rbegin(), steps_reversed.rend());
  return asi;
}

namespace {

// Cartesian product of component label sets, first component major.
std::vector<std::vector<std::string>> label_product(
    const std::vector<std::vector<std::string>>& components) {
  std::vector<std::vector<std::string>> tuples{{}};
  for (const auto& comp : components) {
    std::vector<std::vector<std::string>> next;
    for (const auto& prefix : tuples)
      for (const auto& value : comp) {
        auto t = prefix;
        t.push_back(value);
        next.push_back(std::move(t));
      }
    tuples = std::move(next);
  }
  return tuples;
}

std::vector<std::string> joined_product(
    const std::vector<std::vector<std::string>>& components) {
  std::vector<std::string> out;
  for (const auto& t : label_product(components)) out.push_back(join_labels(t));
  return out;
}

// Marginalization link: each tuple of length k maps deterministically to its
// length k-1 prefix.
StochasticMatrix marginal_link(
    const std::vector<std::vector<std::string>>& components, std::size_t k) {
  StochasticMatrix nu;
  nu.rows = joined_product({components.begin(), components.begin() + k});
  nu.cols = joined_product({components.begin(), components.begin() + k - 1});
  nu.matrix = RealMatrix::Zero(nu.rows.size(), nu.cols.size());
  for (std::size_t r = 0; r < nu.rows.size(); ++r) {
    auto parts = split_label(nu.rows[r]);
    parts.pop_back();
    const std::string prefix = join_labels(parts);
    for (std::size_t c = 0; c < nu.cols.size(); ++c)
      if (nu.cols[c] == prefix) nu.matrix(r, c) = 1.0;
  }
  return nu;
}

}  // namespace

AdaptiveSequence product_outcomes(const Instrument& target, double tol) {
  if (target.outcomes.empty())
    throw std::invalid_argument("instrument has no outcomes");
  std::vector<std::vector<std::string>> parts;
  for (const auto& label : target.outcomes) parts.push_back(split_label(label));
  const std::size_t n = parts[0].size();
  for (const auto& p : parts)
    if (p.size() != n)
      throw std::invalid_argument(
          "outcome labels are not tuples of a common length");
  if (n == 1) return n_step(target, {}, tol);

  // Component value sets in first-appearance order.
  std::vector<std::vector<std::string>> components(n);
  for (const auto& p : parts)
    for (std::size_t i = 0; i < n; ++i)
      if (std::find(components[i].begin(), components[i].end(), p[i]) ==
          components[i].end())
        components[i].push_back(p[i]);

  std::size_t expected = 1;
  for (const auto& comp : components) expected *= comp.size();
  if (expected != target.outcomes.size())
    throw std::invalid_argument(
        "outcome labels do not form a full cartesian product");
  for (const auto& label : joined_product(components))
    target.outcome_index(label);  // throws when a combination is missing

  std::vector<StochasticMatrix> chain;
  for (std::size_t k = n; k >= 2; --k)
    chain.push_back(marginal_link(components, k));
  return n_step(target, chain, tol);
}

MinAncillaDecomposition min_ancilla(const Instrument& target, double tol) {
  require_valid(target, "target instrument", tol);
  const Index g = ceil_div(target.dim_out, target.dim_in);
  if (g <= 1)
    throw std::domain_error(
        "smallest-ancilla construction requires g > 1 (output dimension more "
        "than the input dimension)");

  const DetailedInstrument detailed = detailed_instrument(target, tol);
  const Index r_t = detailed.instrument.size();
  if (r_t == 0)
    throw std::invalid_argument("target instrument has no Kraus operators");

  MinAncillaDecomposition out;
  out.detailed_rank = r_t;
  if (r_t <= 1) {
    out.asi = n_step(target, {}, tol);
    out.coarse_map = target.outcomes;
    return out;
  }

  Index n_steps = 1;
  Index capacity = 1;
  while (capacity < r_t) {
    capacity *= g;
    ++n_steps;
  }

  std::vector<std::string> digits;
  for (Index v = 0; v < g; ++v) digits.push_back(std::to_string(v));
  const std::vector<std::vector<std::string>> components(n_steps - 1, digits);
  const std::vector<std::string> slots = joined_product(components);

  // The detailed target spread over the g^{N-1} slots; unused slots hold
  // explicit zero operations and coarse-grain to nothing.
  Instrument spread;
  spread.dim_in = target.dim_in;
  spread.dim_out = target.dim_out;
  spread.outcomes = slots;
  spread.operations.assign(slots.size(), {});
  out.coarse_map.assign(slots.size(), "");
  for (Index i = 0; i < r_t; ++i) {
    spread.operations[i] = detailed.instrument.operations[i];
    out.coarse_map[i] = detailed.coarse_map[i];
  }

  std::vector<StochasticMatrix> chain{StochasticMatrix::identity(slots)};
  for (std::size_t k = components.size(); k >= 2; --k)
    chain.push_back(marginal_link(components, k));
  out.asi = n_step(spread, chain, tol);
  return out;
}

PovmTwoStep povm_two_step(const Povm& target, const StochasticMatrix& nu,
                          double tol) {
  {
    const auto diags = validate(target, tol);
    if (!diags.empty())
      throw std::invalid_argument("target POVM: " + diags[0].code + " (" +
                                  diags[0].message + ")");
  }
  require_valid(nu, tol);
  const StochasticMatrix aligned = align_rows(nu, target.outcomes);
  if (aligned.cols.empty())
    throw std::invalid_argument("postprocessing matrix has no outcomes");

  const Povm b = postprocess_povm(target, aligned);
  PovmTwoStep out;
  out.initial = luders(b, tol);
  out.postproc = aligned;

  const Index d = target.dim;
  for (std::size_t j = 0; j < aligned.cols.size(); ++j) {
    const EffectSupport sup = effect_support(b.effects[j], tol);
    Povm cond;
    cond.dim = d;
    cond.outcomes = target.outcomes;
    for (Index k = 0; k < target.size(); ++k) {
      const double nu_kj = aligned.matrix(k, j);
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      if (nu_kj > 0.0)
        e = hermitize(sup.inv_sqrt * (nu_kj * target.effects[k]) *
                      sup.inv_sqrt);
      cond.effects.push_back(std::move(e));
    }
    if (sup.rank < d) {
      const Index k0 = first_live_outcome(aligned, static_cast<Index>(j));
      cond.effects[k0] += ComplexMatrix::Identity(d, d) - sup.projector;
      cond.effects[k0] = hermitize(cond.effects[k0]);
    }
    out.conditional.push_back(std::move(cond));
  }
  return out;
}

AdaptiveSequence PovmTwoStep::as_asi(double tol) const {
  AdaptiveSequence asi;
  asi.dim0 = initial.dim_in;
  AdaptiveStep first;
  first.dim_out = initial.dim_out;
  first.keys = {"1"};
  first.instruments = {initial};
  AdaptiveStep second;
  second.dim_out = 1;
  second.keys = postproc.cols;
  for (const Povm& c : conditional)
    second.instruments.push_back(povm_as_instrument(c, tol));
  asi.steps = {std::move(first), std::move(second)};
  return asi;
}

const Instrument& HistoryStep::instrument_for(
    const std::vector<std::string>& history) const {
  for (const auto& [h, ins] : table)
    if (h == history) return ins;
  throw std::invalid_argument("history table misses entry for (" +
                              join_labels(history) + ")");
}

AdaptiveSequence lift_history_dependence(const std::vector<HistoryStep>& raw) {
  if (raw.empty()) throw std::invalid_argument("empty history process");
  if (raw[0].table.size() != 1 || !raw[0].table[0].first.empty())
    throw std::invalid_argument(
        "step 1 must hold a single entry with empty history");

  const Instrument& first = raw[0].table[0].second;
  AdaptiveSequence asi;
  asi.dim0 = first.dim_in;

  AdaptiveStep step1;
  step1.dim_out = first.dim_out;
  step1.keys = {"1"};
  step1.instruments = {first};
  asi.steps.push_back(std::move(step1));

  std::vector<std::vector<std::string>> components{first.outcomes};
  Index dim_prev = first.dim_out;

  for (std::size_t s = 1; s < raw.size(); ++s) {
    if (raw[s].table.empty())
      throw std::invalid_argument("empty history table at step " +
                                  std::to_string(s + 1));
    const Instrument& sample = raw[s].table[0].second;
    for (const auto& [h, ins] : raw[s].table) {
      if (ins.dim_in != dim_prev || ins.dim_out != sample.dim_out)
        throw std::invalid_argument("dimension chain mismatch at step " +
                                    std::to_string(s + 1));
      if (ins.outcomes != sample.outcomes)
        throw std::invalid_argument(
            "instruments at one step must share an outcome set");
    }

    const auto histories = label_product(components);
    components.push_back(sample.outcomes);
    const std::vector<std::string> omega = joined_product(components);

    AdaptiveStep step;
    step.dim_out = sample.dim_out;
    for (const auto& history : histories) {
      const Instrument& chosen = raw[s].instrument_for(history);
      Instrument lifted;
      lifted.dim_in = dim_prev;
      lifted.dim_out = sample.dim_out;
      lifted.outcomes = omega;
      for (const std::string& label : omega) {
        auto tuple = split_label(label);
        const std::string last = tuple.back();
        tuple.pop_back();
        if (tuple == history)
          lifted.operations.push_back(
              chosen.operations[chosen.outcome_index(last)]);
        else
          lifted.operations.emplace_back();
      }
      step.keys.push_back(join_labels(history));
      step.instruments.push_back(std::move(lifted));
    }
    asi.steps.push_back(std::move(step));
    dim_prev = sample.dim_out;
  }
  return asi;
}

}  // namespace iqseq
