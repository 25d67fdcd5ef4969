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

#include "iqseq/runtime.hpp"

#include <map>
#include <stdexcept>

namespace iqseq {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_double() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::scramble(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SplitMix64 SplitMix64::for_stream(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(scramble(seed + 0x9E3779B97F4A7C15ULL * (stream + 1)));
}

namespace {

void require_valid_asi(const AdaptiveSequence& asi, double tol) {
  const auto diags = validate(asi, tol);
  if (!diags.empty())
    throw std::invalid_argument("adaptive sequence: " + diags[0].code + " (" +
                                diags[0].message + ")");
}

}  // namespace

Instrument total_instrument(const AdaptiveSequence& asi, double tol) {
  require_valid_asi(asi, tol);

  // Superoperators compose by matrix product and sum over intermediate
  // outcomes by matrix sum, so the path count never blows up.
  Index dim_prev = asi.dim0;
  std::vector<ComplexMatrix> acc;  // per current outcome label
  {
    const Instrument& first = asi.steps[0].instruments[0];
    for (const KrausList& ops : first.operations)
      acc.push_back(superoperator(ops, first.dim_in, first.dim_out));
    dim_prev = first.dim_out;
  }

  for (std::size_t s = 1; s < asi.steps.size(); ++s) {
    const AdaptiveStep& step = asi.steps[s];
    const Index n_out = step.instruments[0].size();
    std::vector<ComplexMatrix> next(
        n_out, ComplexMatrix::Zero(step.dim_out * step.dim_out,
                                   asi.dim0 * asi.dim0));
    for (std::size_t key = 0; key < step.keys.size(); ++key) {
      const Instrument& ins = step.instruments[key];
      for (Index b = 0; b < n_out; ++b) {
        if (ins.operations[b].empty()) continue;
        next[b].noalias() +=
            superoperator(ins.operations[b], ins.dim_in, ins.dim_out) *
            acc[key];
      }
    }
    acc = std::move(next);
    dim_prev = step.dim_out;
  }

  Instrument total;
  total.dim_in = asi.dim0;
  total.dim_out = dim_prev;
  total.outcomes = asi.final_outcomes();
  for (const ComplexMatrix& s : acc) {
    const ComplexMatrix c =
        hermitize(choi_from_superoperator(s, total.dim_in, total.dim_out));
    total.operations.push_back(
        kraus_from_choi(c, total.dim_in, total.dim_out, tol));
  }
  return total;
}

RunResult run(const AdaptiveSequence& asi, const DensityMatrix& rho0,
              std::uint64_t shots, std::uint64_t seed,
              bool record_intermediate, std::size_t max_trajectories) {
  require_valid_asi(asi, kDefaultTol);
  if (rho0.rho.rows() != asi.dim0 || rho0.rho.cols() != asi.dim0)
    throw std::invalid_argument("initial state dimension does not match");
  {
    const auto diags = validate(rho0, 1e-6);
    if (!diags.empty())
      throw std::invalid_argument("initial state: " + diags[0].code);
  }

  // Outcome probabilities only need the effects; cache them per (step, key).
  std::vector<std::vector<std::vector<ComplexMatrix>>> effects(
      asi.steps.size());
  for (std::size_t s = 0; s < asi.steps.size(); ++s) {
    const AdaptiveStep& step = asi.steps[s];
    effects[s].resize(step.instruments.size());
    for (std::size_t t = 0; t < step.instruments.size(); ++t)
      for (const KrausList& ops : step.instruments[t].operations)
        effects[s][t].push_back(
            induced_effect(ops, step.instruments[t].dim_in));
  }

  RunResult result;
  result.stats.shots = shots;
  result.stats.seed = seed;
  result.stats.intermediate_recorded = record_intermediate;
  const auto& final_labels = asi.final_outcomes();
  std::vector<std::uint64_t> final_counts(final_labels.size(), 0);
  std::map<std::string, std::uint64_t> sequence_counts;

  for (std::uint64_t shot = 0; shot < shots; ++shot) {
    SplitMix64 rng = SplitMix64::for_stream(seed, shot);
    ComplexMatrix rho = rho0.rho;
    Trajectory traj;
    traj.probability = 1.0;
    Index key = 0;
    Index chosen = 0;

    for (std::size_t s = 0; s < asi.steps.size(); ++s) {
      const AdaptiveStep& step = asi.steps[s];
      const Instrument& ins = step.instruments[key];
      const auto& eff = effects[s][key];

      std::vector<double> probs(eff.size(), 0.0);
      double total = 0.0;
      for (std::size_t i = 0; i < eff.size(); ++i) {
        if (ins.operations[i].empty()) continue;
        probs[i] = std::max(0.0, (rho * eff[i]).trace().real());
        total += probs[i];
      }
      if (total <= 1e-12)
        throw std::runtime_error(
            "all outcome probabilities vanish at step " + std::to_string(s + 1));
      if (std::abs(total - 1.0) > 1e-9) ++result.stats.renormalized_branches;

      const double u = rng.next_double() * total;
      double cum = 0.0;
      chosen = -1;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        cum += probs[i];
        chosen = static_cast<Index>(i);
        if (u < cum) break;
      }

      const ApplyResult res = iqseq::apply(ins.operations[chosen], rho);
      rho = res.state / res.probability;
      traj.probability *= res.probability;
      traj.outcomes.push_back(ins.outcomes[chosen]);
      key = chosen;
    }

    ++final_counts[chosen];
    if (record_intermediate) {
      std::string seq;
      for (std::size_t i = 0; i < traj.outcomes.size(); ++i) {
        if (i > 0) seq += ';';
        seq += traj.outcomes[i];
      }
      ++sequence_counts[seq];
    }
    if (result.trajectories.size() < max_trajectories) {
      traj.final_state = rho;
      result.trajectories.push_back(std::move(traj));
    }
  }

  for (std::size_t i = 0; i < final_labels.size(); ++i)
    result.stats.final_counts.emplace_back(final_labels[i], final_counts[i]);
  for (const auto& [k, v] : sequence_counts)
    result.stats.sequence_counts.emplace_back(k, v);
  return result;
}

EquivalenceReport verify_equivalence(const AdaptiveSequence& asi,
                                     const Instrument& target, double tol) {
  const Instrument total = total_instrument(asi, tol);
  if (total.dim_in != target.dim_in || total.dim_out != target.dim_out)
    throw std::invalid_argument(
        "sequence and target dimensions do not match");
  if (total.size() != target.size())
    throw std::invalid_argument(
        "sequence and target outcome sets do not match");

  EquivalenceReport report;
  report.tolerance = tol;
  for (Index i = 0; i < target.size(); ++i) {
    const Index j = total.outcome_index(target.outcomes[i]);
    const double d = choi_distance(total.operations[j], target.operations[i],
                                   target.dim_in, target.dim_out);
    report.per_outcome.push_back({target.outcomes[i], d});
    report.max_choi_distance = std::max(report.max_choi_distance, d);
  }

  const Povm povm_total = induced_povm(total);
  const Povm povm_target = induced_povm(target);
  for (Index i = 0; i < target.size(); ++i) {
    const Index j = povm_total.outcome_index(target.outcomes[i]);
    report.povm_distance =
        std::max(report.povm_distance,
                 (povm_total.effects[j] - povm_target.effects[i]).norm());
  }
  report.channel_distance =
      choi_distance(induced_channel(total), induced_channel(target),
                    target.dim_in, target.dim_out);
  report.pass = report.max_choi_distance < tol;
  return report;
}

}  // namespace iqseq
