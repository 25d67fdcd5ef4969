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

#include <catch2/catch_amalgamated.hpp>

#include "iqseq/decompose.hpp"
#include "iqseq/examples.hpp"
#include "support/random_instances.hpp"

using namespace iqseq;
using iqseq::testing::Rng;

namespace {

StochasticMatrix three_outcome_nu() {
  StochasticMatrix nu;
  nu.rows = {"0", "1", "2"};
  nu.cols = {"0", "1"};
  nu.matrix.resize(3, 2);
  nu.matrix << 1, 0, 1, 0, 0, 1;
  return nu;
}

DensityMatrix basis_state(Index dim, Index i) {
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(i, i) = 1.0;
  return {rho};
}

}  // namespace

TEST_CASE("total instrument of a one-step sequence is the instrument") {
  Rng rng(3);
  const Instrument target = testing::random_instrument(rng, 2, 3, {1, 2});
  const Instrument total = total_instrument(n_step(target, {}));
  for (Index k = 0; k < target.size(); ++k)
    REQUIRE(choi_distance(total.operations[k], target.operations[k], 2, 3) <
            1e-12);
}

TEST_CASE("total instrument of the worked example recovers the target") {
  const Instrument target = luders(three_outcome_povm());
  const AdaptiveSequence asi =
      two_step(target, three_outcome_nu()).as_asi();
  const Instrument total = total_instrument(asi);
  for (Index k = 0; k < 3; ++k)
    REQUIRE(choi_distance(total.operations[k], target.operations[k], 3, 3) <
            1e-10);
}

TEST_CASE("total instrument compresses to minimal rank") {
  const Instrument target = luders(three_outcome_povm());
  const Instrument total =
      total_instrument(two_step(target, three_outcome_nu()).as_asi());
  for (Index k = 0; k < 3; ++k)
    CHECK(total.operations[k].size() == 1);
}

TEST_CASE("three-step sequences recompose") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Instrument target = testing::random_instrument(
        rng, 2, rng.pick(2, 4), {rng.pick(1, 2), rng.pick(1, 2)});
    std::vector<StochasticMatrix> chain;
    chain.push_back(testing::random_stochastic(rng, target.outcomes, 2));
    chain.push_back(testing::random_stochastic(rng, chain[0].cols, 2));
    const Instrument total = total_instrument(n_step(target, chain));
    for (Index k = 0; k < target.size(); ++k)
      REQUIRE(choi_distance(total.operations[k], target.operations[k],
                            target.dim_in, target.dim_out) < 1e-9);
  }
}

TEST_CASE("single-outcome chains always produce the same labels") {
  Rng rng(7);
  // Two chained channels: every trajectory reads ("0", "0").
  const Instrument ch1 = testing::random_instrument(rng, 2, 2, {2});
  const Instrument ch2 = testing::random_instrument(rng, 2, 2, {1});
  AdaptiveSequence asi;
  asi.dim0 = 2;
  asi.steps.push_back({2, {"1"}, {ch1}});
  asi.steps.push_back({2, {"0"}, {ch2}});

  const RunResult result =
      run(asi, testing::random_state(rng, 2), 200, 42, true);
  REQUIRE(result.stats.sequence_counts.size() == 1);
  CHECK(result.stats.sequence_counts[0].first == "0;0");
  CHECK(result.stats.sequence_counts[0].second == 200);
}

TEST_CASE("the worked example always takes branch zero from state one") {
  // Tr[P_1 B_0] = 1, so the first step deterministically reports "0".
  const Instrument target = luders(three_outcome_povm());
  const AdaptiveSequence asi =
      two_step(target, three_outcome_nu()).as_asi();
  const RunResult result = run(asi, basis_state(3, 1), 500, 7, true);
  for (const auto& [sequence, count] : result.stats.sequence_counts)
    REQUIRE(sequence.rfind("0;", 0) == 0);
}

TEST_CASE("sampled frequencies follow the Born rule") {
  Rng rng(11);
  const Povm a = qubit4_povm(ExampleParams::sic());
  const AdaptiveSequence asi = product_outcomes(luders(a));
  DensityMatrix mixed{0.5 * ComplexMatrix::Identity(2, 2)};
  const std::uint64_t shots = 20000;
  const RunResult result = run(asi, mixed, shots, 2024);

  // All four outcomes are equally likely on the maximally mixed state.
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(shots));
  double sum = 0.0;
  for (const auto& [label, count] : result.stats.final_counts) {
    const double freq = static_cast<double>(count) / shots;
    sum += freq;
    REQUIRE(std::abs(freq - 0.25) < 5.0 * sigma);
  }
  CHECK(sum == Catch::Approx(1.0));
}

TEST_CASE("equal seeds give identical statistics and trajectories") {
  Rng rng(13);
  const Instrument target = testing::random_instrument(rng, 2, 2, {1, 1, 2});
  const StochasticMatrix nu =
      testing::random_stochastic(rng, target.outcomes, 2);
  const AdaptiveSequence asi = two_step(target, nu).as_asi();
  const DensityMatrix rho = testing::random_state(rng, 2);

  const RunResult a = run(asi, rho, 2000, 99, true);
  const RunResult b = run(asi, rho, 2000, 99, true);
  REQUIRE(a.stats.final_counts == b.stats.final_counts);
  REQUIRE(a.stats.sequence_counts == b.stats.sequence_counts);
  REQUIRE(a.trajectories.size() == b.trajectories.size());
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
    CHECK(a.trajectories[i].outcomes == b.trajectories[i].outcomes);
    CHECK(a.trajectories[i].probability == b.trajectories[i].probability);
  }

  const RunResult c = run(asi, rho, 2000, 100, true);
  CHECK(a.stats.final_counts != c.stats.final_counts);
}

TEST_CASE("dead branches never appear in sampled trajectories") {
  Rng rng(17);
  const Instrument target = testing::random_instrument(rng, 3, 3, {1, 1, 1});
  const StochasticMatrix nu =
      testing::random_coarse_graining(rng, target.outcomes, 2);
  const AdaptiveSequence asi = two_step(target, nu).as_asi();
  const RunResult result =
      run(asi, testing::random_state(rng, 3), 5000, 31, true);
  for (const auto& [sequence, count] : result.stats.sequence_counts) {
    const auto split = sequence.find(';');
    const std::string j = sequence.substr(0, split);
    const std::string k = sequence.substr(split + 1);
    const Index jj = std::stoi(j);
    const Index kk = target.outcome_index(k);
    REQUIRE(nu.matrix(kk, jj) > 0.0);
  }
}

TEST_CASE("trajectory probabilities multiply to the Born weight") {
  Rng rng(19);
  const Instrument target = testing::random_instrument(rng, 2, 2, {1, 1, 1});
  const StochasticMatrix nu =
      testing::random_stochastic(rng, target.outcomes, 2);
  const AdaptiveSequence asi = two_step(target, nu).as_asi();
  const DensityMatrix rho = testing::random_state(rng, 2);
  const RunResult result = run(asi, rho, 8, 5, false, 8);
  for (const Trajectory& t : result.trajectories) {
    CHECK(t.probability > 0.0);
    CHECK(t.probability <= 1.0 + 1e-12);
    CHECK(std::abs(t.final_state.trace().real() - 1.0) < 1e-10);
  }
}

TEST_CASE("verification passes on construction and fails on perturbation") {
  Rng rng(23);
  const Instrument target = testing::random_instrument(rng, 2, 3, {1, 2});
  const StochasticMatrix nu =
      testing::random_stochastic(rng, target.outcomes, 2);
  const TwoStepDecomposition dec = two_step(target, nu);
  REQUIRE(verify_equivalence(dec.as_asi(), target, 1e-9).pass);

  TwoStepDecomposition scaled = dec;
  for (auto& ops : scaled.residuals[0].operations)
    for (auto& k : ops) k *= 1.01;
  const EquivalenceReport bad =
      verify_equivalence(scaled.as_asi(), target, 1e-9);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_choi_distance > 1e-3);
}

TEST_CASE("identity sequences verify exactly") {
  AdaptiveSequence asi;
  asi.dim0 = 2;
  Instrument id;
  id.dim_in = 2;
  id.dim_out = 2;
  id.outcomes = {"0"};
  id.operations = {{ComplexMatrix::Identity(2, 2)}};
  asi.steps.push_back({2, {"1"}, {id}});
  const EquivalenceReport report = verify_equivalence(asi, id, 1e-12);
  CHECK(report.pass);
  CHECK(report.max_choi_distance == 0.0);
}

TEST_CASE("verification rejects mismatched outcome sets") {
  Rng rng(29);
  const Instrument target = testing::random_instrument(rng, 2, 2, {1, 1});
  Instrument renamed = target;
  renamed.outcomes = {"x", "y"};
  const AdaptiveSequence asi = n_step(target, {});
  CHECK_THROWS_AS(verify_equivalence(asi, renamed, 1e-9),
                  std::invalid_argument);
}

TEST_CASE("splitmix streams are stable") {
  // Reference values of the SplitMix64 sequence seeded with 1234567.
  SplitMix64 gen(1234567);
  CHECK(gen.next() == 6457827717110365317ULL);
  CHECK(gen.next() == 3203168211198807973ULL);
}

TEST_CASE("lifted history processes never contradict their prefix") {
  Rng rng(31);
  std::vector<HistoryStep> raw(2);
  raw[0].table.push_back({{}, testing::random_instrument(rng, 2, 2, {1, 1})});
  const Instrument& e = raw[0].table[0].second;
  for (const std::string& b1 : e.outcomes)
    raw[1].table.push_back(
        {{b1}, testing::random_instrument(rng, 2, 2, {1, 1})});
  const AdaptiveSequence asi = lift_history_dependence(raw);
  const RunResult result =
      run(asi, testing::random_state(rng, 2), 10000, 77, true);
  for (const auto& [sequence, count] : result.stats.sequence_counts) {
    const auto split = sequence.find(';');
    const std::string a1 = sequence.substr(0, split);
    const std::string pair = sequence.substr(split + 1);
    REQUIRE(split_label(pair)[0] == a1);
  }
}
