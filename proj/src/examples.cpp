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

#include "iqseq/examples.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace iqseq {

namespace {

ComplexMatrix basis_projector(Index dim, Index i) {
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  p(i, i) = 1.0;
  return p;
}

}  // namespace

ExampleParams ExampleParams::sic() {
  const double angle = std::acos(1.0 / std::sqrt(3.0));
  return {angle, angle, 1.0 / std::sqrt(3.0)};
}

void ExampleParams::check() const {
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(alpha > 0.0 && alpha < half_pi) || !(beta > 0.0 && beta < half_pi))
    throw std::invalid_argument("alpha and beta must lie in (0, pi/2)");
  if (alpha < beta)
    throw std::invalid_argument("convention requires alpha >= beta");
  const double eta_max = std::min(std::cos(alpha), std::cos(beta));
  if (!(eta > 0.0 && eta <= eta_max + 1e-12))
    throw std::invalid_argument(
        "eta must lie in (0, min(cos alpha, cos beta)]");
}

Povm three_outcome_povm() {
  Povm povm;
  povm.dim = 3;
  povm.outcomes = {"0", "1", "2"};
  for (Index i = 0; i < 3; ++i)
    povm.effects.push_back(
        0.5 * (basis_projector(3, i) + basis_projector(3, (i + 1) % 3)));
  return povm;
}

Instrument shrinking_instrument() {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 4);
  k1(0, 0) = 1.0;
  k1(1, 1) = s;
  ComplexMatrix k2 = ComplexMatrix::Zero(2, 4);
  k2(0, 1) = s;
  k2(1, 2) = s;
  ComplexMatrix k3 = ComplexMatrix::Zero(2, 4);
  k3(0, 2) = s;
  k3(1, 3) = 1.0;

  Instrument ins;
  ins.dim_in = 4;
  ins.dim_out = 2;
  ins.outcomes = {"1", "2", "3"};
  ins.operations = {{k1}, {k2}, {k3}};
  return ins;
}

namespace {

std::array<std::array<Eigen::Vector3d, 2>, 2> effect_axes(
    const ExampleParams& p) {
  return {{{Eigen::Vector3d(-std::sin(p.beta), 0.0, -std::cos(p.beta)),
            Eigen::Vector3d(std::sin(p.beta), 0.0, -std::cos(p.beta))},
           {Eigen::Vector3d(0.0, -std::sin(p.alpha), std::cos(p.alpha)),
            Eigen::Vector3d(0.0, std::sin(p.alpha), std::cos(p.alpha))}}};
}

}  // namespace

Povm qubit4_povm(const ExampleParams& params) {
  params.check();
  const auto axes = effect_axes(params);
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);

  Povm povm;
  povm.dim = 2;
  for (int j = 0; j < 2; ++j) {
    const double sec = 1.0 / std::cos(j == 0 ? params.beta : params.alpha);
    for (int k = 0; k < 2; ++k) {
      povm.outcomes.push_back(join_labels({std::to_string(j),
                                           std::to_string(k)}));
      povm.effects.push_back(
          0.25 * (id + params.eta * sec * pauli_vector(axes[j][k])));
    }
  }
  return povm;
}

Qubit4ClosedForms qubit4_closed_forms(const ExampleParams& params) {
  params.check();
  const auto axes = effect_axes(params);
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const double eta = params.eta;

  const double f_plus = std::sqrt((1.0 + eta) / 2.0);
  const double f_minus = std::sqrt((1.0 - eta) / 2.0);
  const double cap_f_plus = 0.5 * (f_plus + f_minus);
  const double cap_f_minus = 0.5 * (f_plus - f_minus);
  const double h_plus = 1.0 / f_plus;
  const double h_minus = 1.0 / f_minus;
  const double cap_h_plus = 0.5 * (h_plus + h_minus);
  const double cap_h_minus = 0.5 * (h_plus - h_minus);

  Qubit4ClosedForms forms;
  forms.n_a = axes;
  for (int j = 0; j < 2; ++j) {
    forms.n_b[j] = (axes[j][0] + axes[j][1]).normalized();
    const ComplexMatrix nb_sigma = pauli_vector(forms.n_b[j]);
    forms.step1[j] = cap_f_plus * id + cap_f_minus * nb_sigma;
    const ComplexMatrix inv_sqrt_b = cap_h_plus * id + cap_h_minus * nb_sigma;

    const double sec = 1.0 / std::cos(j == 0 ? params.beta : params.alpha);
    const double g_plus = 0.5 * std::sqrt(std::max(0.0, 1.0 + eta * sec));
    const double g_minus = 0.5 * std::sqrt(std::max(0.0, 1.0 - eta * sec));
    const double cap_g_plus = 0.5 * (g_plus + g_minus);
    const double cap_g_minus = 0.5 * (g_plus - g_minus);
    for (int k = 0; k < 2; ++k)
      forms.step2[j][k] =
          (cap_g_plus * id + cap_g_minus * pauli_vector(axes[j][k])) *
          inv_sqrt_b;
  }
  return forms;
}

GeneratedExample gen_example(const std::string& name,
                             const std::optional<ExampleParams>& params) {
  GeneratedExample out;
  if (name == "three-outcome") {
    out.povm = three_outcome_povm();
  } else if (name == "shrinking") {
    out.instrument = shrinking_instrument();
  } else if (name == "qubit4") {
    out.povm = qubit4_povm(params.value_or(ExampleParams::sic()));
  } else if (name == "qubit4-sic") {
    out.povm = qubit4_povm(ExampleParams::sic());
  } else {
    throw std::invalid_argument("unknown example: " + name +
                                " (known: three-outcome, shrinking, qubit4, "
                                "qubit4-sic)");
  }
  return out;
}

}  // namespace iqseq
