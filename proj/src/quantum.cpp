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

#include "iqseq/quantum.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace iqseq {

namespace {

Index find_label(const std::vector<std::string>& labels,
                 const std::string& label, const char* what) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<Index>(i);
  throw std::invalid_argument(std::string("unknown ") + what + " label: " +
                              label);
}

void push(std::vector<Diagnostic>& out, std::string code, std::string message,
          double residual) {
  out.push_back({std::move(code), std::move(message), residual});
}

bool unique_labels(const std::vector<std::string>& labels) {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second) return false;
  return true;
}

ComplexVector flat_row_major(const ComplexMatrix& k) {
  ComplexVector v(k.rows() * k.cols());
  for (Index i = 0; i < k.rows(); ++i)
    for (Index a = 0; a < k.cols(); ++a) v(i * k.cols() + a) = k(i, a);
  return v;
}

}  // namespace

Index Povm::outcome_index(const std::string& label) const {
  return find_label(outcomes, label, "POVM outcome");
}

Index Instrument::outcome_index(const std::string& label) const {
  return find_label(outcomes, label, "instrument outcome");
}

StochasticMatrix StochasticMatrix::identity(
    const std::vector<std::string>& labels) {
  StochasticMatrix nu;
  nu.rows = labels;
  nu.cols = labels;
  nu.matrix = RealMatrix::Identity(labels.size(), labels.size());
  return nu;
}

const Instrument& AdaptiveStep::instrument_for(const std::string& key) const {
  return instruments[find_label(keys, key, "adaptive step key")];
}

std::vector<Index> AdaptiveSequence::dims() const {
  std::vector<Index> d{dim0};
  for (const auto& step : steps) d.push_back(step.dim_out);
  return d;
}

const std::vector<std::string>& AdaptiveSequence::outcomes_at_step(
    Index k) const {
  return steps.at(k - 1).instruments.at(0).outcomes;
}

const std::vector<std::string>& AdaptiveSequence::final_outcomes() const {
  return outcomes_at_step(num_steps());
}

std::vector<Diagnostic> validate(const Povm& povm, double tol) {
  std::vector<Diagnostic> out;
  if (povm.dim <= 0) {
    push(out, "povm.dim", "nonpositive Hilbert-space dimension", 0.0);
    return out;
  }
  if (povm.effects.size() != povm.outcomes.size()) {
    push(out, "povm.shape", "outcome/effect count mismatch", 0.0);
    return out;
  }
  if (!unique_labels(povm.outcomes))
    push(out, "povm.labels", "duplicate outcome labels", 0.0);

  ComplexMatrix sum = ComplexMatrix::Zero(povm.dim, povm.dim);
  for (Index i = 0; i < povm.size(); ++i) {
    const ComplexMatrix& e = povm.effects[i];
    const std::string& label = povm.outcomes[i];
    if (e.rows() != povm.dim || e.cols() != povm.dim) {
      push(out, "povm.effect_shape", "effect " + label + " has wrong shape",
           0.0);
      continue;
    }
    if (!e.allFinite()) {
      push(out, "povm.nonfinite", "effect " + label + " has NaN/Inf entries",
           0.0);
      continue;
    }
    const double herm = (e - e.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol)
      push(out, "povm.effect_not_hermitian", "effect " + label, herm);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
        hermitize(e), Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues().minCoeff();
    const double hi = solver.eigenvalues().maxCoeff();
    if (lo < -tol)
      push(out, "povm.effect_negative", "effect " + label, -lo);
    if (hi > 1.0 + tol)
      push(out, "povm.effect_above_identity", "effect " + label, hi - 1.0);
    sum += e;
  }
  const double norm_residual = spectral_norm_hermitian(
      sum - ComplexMatrix::Identity(povm.dim, povm.dim));
  if (norm_residual > tol)
    push(out, "povm.normalization", "effects do not sum to identity",
         norm_residual);
  return out;
}

std::vector<Diagnostic> validate(const StochasticMatrix& nu, double tol) {
  std::vector<Diagnostic> out;
  if (nu.matrix.rows() != static_cast<Index>(nu.rows.size()) ||
      nu.matrix.cols() != static_cast<Index>(nu.cols.size())) {
    push(out, "stochastic.shape", "matrix shape does not match labels", 0.0);
    return out;
  }
  if (!unique_labels(nu.rows) || !unique_labels(nu.cols))
    push(out, "stochastic.labels", "duplicate labels", 0.0);
  for (Index k = 0; k < nu.matrix.rows(); ++k) {
    const double lo = nu.matrix.row(k).minCoeff();
    if (lo < -tol)
      push(out, "stochastic.negative_entry", "row " + nu.rows[k], -lo);
    const double row_sum = nu.matrix.row(k).sum();
    if (std::abs(row_sum - 1.0) > tol)
      push(out, "stochastic.row_sum", "row " + nu.rows[k],
           std::abs(row_sum - 1.0));
  }
  return out;
}

std::vector<Diagnostic> validate(const Instrument& ins, double tol) {
  std::vector<Diagnostic> out;
  if (ins.dim_in <= 0 || ins.dim_out <= 0) {
    push(out, "instrument.dim", "nonpositive dimension", 0.0);
    return out;
  }
  if (ins.operations.size() != ins.outcomes.size()) {
    push(out, "instrument.shape", "outcome/operation count mismatch", 0.0);
    return out;
  }
  if (!unique_labels(ins.outcomes))
    push(out, "instrument.labels", "duplicate outcome labels", 0.0);

  ComplexMatrix sum = ComplexMatrix::Zero(ins.dim_in, ins.dim_in);
  bool shapes_ok = true;
  for (Index i = 0; i < ins.size(); ++i) {
    for (const ComplexMatrix& k : ins.operations[i]) {
      if (k.rows() != ins.dim_out || k.cols() != ins.dim_in) {
        push(out, "instrument.kraus_shape",
             "outcome " + ins.outcomes[i] + " has a misshapen Kraus operator",
             0.0);
        shapes_ok = false;
        continue;
      }
      if (!k.allFinite()) {
        push(out, "instrument.nonfinite",
             "outcome " + ins.outcomes[i] + " has NaN/Inf entries", 0.0);
        shapes_ok = false;
        continue;
      }
      sum.noalias() += k.adjoint() * k;
    }
  }
  if (shapes_ok) {
    const double residual = spectral_norm_hermitian(
        sum - ComplexMatrix::Identity(ins.dim_in, ins.dim_in));
    if (residual > tol)
      push(out, "instrument.normalization",
           "Kraus operators do not resolve the identity", residual);
  }
  return out;
}

std::vector<Diagnostic> validate(const AdaptiveSequence& asi, double tol) {
  std::vector<Diagnostic> out;
  if (asi.dim0 <= 0) push(out, "asi.dim", "nonpositive input dimension", 0.0);
  if (asi.steps.empty()) {
    push(out, "asi.steps", "empty sequence", 0.0);
    return out;
  }

  std::vector<std::string> expected_keys{"1"};
  Index dim_in = asi.dim0;
  for (std::size_t s = 0; s < asi.steps.size(); ++s) {
    const AdaptiveStep& step = asi.steps[s];
    const std::string where = "step " + std::to_string(s + 1);
    if (step.keys != expected_keys)
      push(out, "asi.keys",
           where + " keys do not match previous-step outcomes", 0.0);
    if (step.instruments.size() != step.keys.size()) {
      push(out, "asi.table", where + " table size mismatch", 0.0);
      return out;
    }
    if (step.instruments.empty()) {
      push(out, "asi.table", where + " has no instruments", 0.0);
      return out;
    }
    const std::vector<std::string>& omega = step.instruments[0].outcomes;
    for (std::size_t t = 0; t < step.instruments.size(); ++t) {
      const Instrument& ins = step.instruments[t];
      if (ins.outcomes != omega)
        push(out, "asi.outcome_mismatch",
             where + " instruments disagree on the outcome set", 0.0);
      if (ins.dim_in != dim_in || ins.dim_out != step.dim_out)
        push(out, "asi.dim_chain",
             where + " key " + step.keys[t] + " breaks the dimension chain",
             0.0);
      for (const Diagnostic& d : validate(ins, tol))
        push(out, d.code, where + " key " + step.keys[t] + ": " + d.message,
             d.residual);
    }
    expected_keys = omega;
    dim_in = step.dim_out;
  }
  return out;
}

std::vector<Diagnostic> validate(const DensityMatrix& state, double tol) {
  std::vector<Diagnostic> out;
  const ComplexMatrix& rho = state.rho;
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    push(out, "density.shape", "state is not square", 0.0);
    return out;
  }
  if (!rho.allFinite()) {
    push(out, "density.nonfinite", "state has NaN/Inf entries", 0.0);
    return out;
  }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol) push(out, "density.not_hermitian", "state", herm);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(rho),
                                                      Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  if (lo < -tol) push(out, "density.not_psd", "state", -lo);
  const double tr = std::abs(rho.trace().real() - 1.0) +
                    std::abs(rho.trace().imag());
  if (tr > tol) push(out, "density.trace", "state trace differs from 1", tr);
  return out;
}

ComplexMatrix induced_effect(const KrausList& ops, Index dim_in) {
  ComplexMatrix e = ComplexMatrix::Zero(dim_in, dim_in);
  for (const ComplexMatrix& k : ops) e.noalias() += k.adjoint() * k;
  return hermitize(e);
}

Povm induced_povm(const Instrument& ins) {
  Povm povm;
  povm.dim = ins.dim_in;
  povm.outcomes = ins.outcomes;
  povm.effects.reserve(ins.operations.size());
  for (const KrausList& ops : ins.operations)
    povm.effects.push_back(induced_effect(ops, ins.dim_in));
  return povm;
}

KrausList induced_channel(const Instrument& ins) {
  KrausList all;
  for (const KrausList& ops : ins.operations)
    all.insert(all.end(), ops.begin(), ops.end());
  return all;
}

ApplyResult apply(const KrausList& ops, const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("state is not square");
  for (const ComplexMatrix& k : ops)
    if (k.cols() != rho.rows())
      throw std::invalid_argument("state dimension does not match operation");

  ApplyResult out;
  if (ops.empty()) {
    out.state = ComplexMatrix::Zero(rho.rows(), rho.cols());
    out.probability = 0.0;
    return out;
  }
  out.state = ComplexMatrix::Zero(ops[0].rows(), ops[0].rows());
  for (const ComplexMatrix& k : ops) out.state.noalias() += k * rho * k.adjoint();
  out.probability = out.state.trace().real();
  return out;
}

ApplyResult apply_channel(const Instrument& ins, const ComplexMatrix& rho) {
  ApplyResult out;
  out.state = ComplexMatrix::Zero(ins.dim_out, ins.dim_out);
  for (const KrausList& ops : ins.operations) {
    if (ops.empty()) continue;
    out.state += apply(ops, rho).state;
  }
  out.probability = out.state.trace().real();
  return out;
}

Instrument luders(const Povm& povm, double tol) {
  Instrument ins;
  ins.dim_in = povm.dim;
  ins.dim_out = povm.dim;
  ins.outcomes = povm.outcomes;
  ins.operations.reserve(povm.effects.size());
  for (const ComplexMatrix& e : povm.effects) {
    if (spectral_norm_hermitian(e) <= tol)
      ins.operations.emplace_back();  // zero effect -> zero operation
    else
      ins.operations.push_back({matrix_power(e, 0.5, tol)});
  }
  return ins;
}

Instrument povm_as_instrument(const Povm& povm, double tol) {
  Instrument ins;
  ins.dim_in = povm.dim;
  ins.dim_out = 1;
  ins.outcomes = povm.outcomes;
  for (const ComplexMatrix& e : povm.effects) {
    KrausList ops;
    if (spectral_norm_hermitian(e) > tol) {
      const Spectrum spec = spectral_decomposition(e, tol);
      for (Index i = 0; i < spec.eigenvalues.size(); ++i) {
        if (spec.eigenvalues(i) <= spec.zero_cutoff) break;
        ops.push_back(std::sqrt(spec.eigenvalues(i)) *
                      spec.eigenvectors.col(i).adjoint());
      }
    }
    ins.operations.push_back(std::move(ops));
  }
  return ins;
}

Povm postprocess_povm(const Povm& povm, const StochasticMatrix& nu) {
  if (nu.rows.size() != povm.outcomes.size())
    throw std::invalid_argument(
        "postprocessing rows do not cover the POVM outcomes");
  std::vector<Index> row_to_effect(nu.rows.size());
  for (std::size_t k = 0; k < nu.rows.size(); ++k)
    row_to_effect[k] = povm.outcome_index(nu.rows[k]);

  Povm out;
  out.dim = povm.dim;
  out.outcomes = nu.cols;
  for (std::size_t j = 0; j < nu.cols.size(); ++j) {
    ComplexMatrix b = ComplexMatrix::Zero(povm.dim, povm.dim);
    for (std::size_t k = 0; k < nu.rows.size(); ++k)
      b += nu.matrix(k, j) * povm.effects[row_to_effect[k]];
    out.effects.push_back(hermitize(b));
  }
  return out;
}

DetailedInstrument detailed_instrument(const Instrument& ins, double tol) {
  DetailedInstrument out;
  out.instrument.dim_in = ins.dim_in;
  out.instrument.dim_out = ins.dim_out;
  for (Index i = 0; i < ins.size(); ++i) {
    const KrausList minimal = kraus_from_choi(
        choi(ins.operations[i], ins.dim_in, ins.dim_out), ins.dim_in,
        ins.dim_out, tol);
    for (std::size_t m = 0; m < minimal.size(); ++m) {
      out.instrument.outcomes.push_back(ins.outcomes[i] + "#" +
                                        std::to_string(m));
      out.instrument.operations.push_back({minimal[m]});
      out.coarse_map.push_back(ins.outcomes[i]);
    }
  }
  return out;
}

Instrument coarse_grain(const Instrument& fine,
                        const std::vector<std::string>& coarse_map,
                        const std::vector<std::string>& target_outcomes) {
  if (coarse_map.size() != fine.outcomes.size())
    throw std::invalid_argument("coarse map does not cover the outcomes");
  Instrument out;
  out.dim_in = fine.dim_in;
  out.dim_out = fine.dim_out;
  out.outcomes = target_outcomes;
  out.operations.assign(target_outcomes.size(), {});
  for (std::size_t i = 0; i < coarse_map.size(); ++i) {
    if (coarse_map[i].empty()) continue;  // padding slot, holds no operation
    const Index t = find_label(target_outcomes, coarse_map[i], "coarse-grain");
    const KrausList& ops = fine.operations[i];
    out.operations[t].insert(out.operations[t].end(), ops.begin(), ops.end());
  }
  return out;
}

Instrument compose(const Instrument& first, const Instrument& second) {
  if (first.dim_out != second.dim_in)
    throw std::invalid_argument(
        "composition dimension mismatch between instruments");
  Instrument out;
  out.dim_in = first.dim_in;
  out.dim_out = second.dim_out;
  for (Index i = 0; i < first.size(); ++i) {
    for (Index j = 0; j < second.size(); ++j) {
      out.outcomes.push_back(join_labels({first.outcomes[i],
                                          second.outcomes[j]}));
      KrausList ops;
      for (const ComplexMatrix& t : first.operations[i])
        for (const ComplexMatrix& s : second.operations[j])
          ops.push_back(s * t);
      out.operations.push_back(std::move(ops));
    }
  }
  return out;
}

ComplexMatrix choi(const KrausList& ops, Index dim_in, Index dim_out) {
  const Index n = dim_in * dim_out;
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  for (const ComplexMatrix& k : ops) {
    if (k.rows() != dim_out || k.cols() != dim_in)
      throw std::invalid_argument("Kraus operator has wrong shape");
    const ComplexVector f = flat_row_major(k);
    c.noalias() += f * f.adjoint();
  }
  return c;
}

KrausList kraus_from_choi(const ComplexMatrix& c, Index dim_in, Index dim_out,
                          double tol) {
  if (c.rows() != dim_in * dim_out || c.cols() != dim_in * dim_out)
    throw std::invalid_argument("Choi matrix has wrong shape");
  KrausList ops;
  if (spectral_norm_hermitian(c) == 0.0) return ops;
  const Spectrum spec = spectral_decomposition(c, tol);
  for (Index i = 0; i < spec.eigenvalues.size(); ++i) {
    const double lambda = spec.eigenvalues(i);
    if (lambda <= spec.zero_cutoff) break;
    ComplexMatrix k(dim_out, dim_in);
    for (Index r = 0; r < dim_out; ++r)
      for (Index a = 0; a < dim_in; ++a)
        k(r, a) = std::sqrt(lambda) * spec.eigenvectors(r * dim_in + a, i);
    ops.push_back(std::move(k));
  }
  return ops;
}

double choi_distance(const KrausList& a, const KrausList& b, Index dim_in,
                     Index dim_out) {
  return (choi(a, dim_in, dim_out) - choi(b, dim_in, dim_out)).norm();
}

double choi_norm(const KrausList& ops, Index dim_in, Index dim_out) {
  return choi(ops, dim_in, dim_out).norm();
}

Index kraus_rank(const KrausList& ops, Index dim_in, Index dim_out,
                 double tol) {
  if (ops.empty()) return 0;
  const ComplexMatrix c = choi(ops, dim_in, dim_out);
  if (spectral_norm_hermitian(c) == 0.0) return 0;
  return spectral_decomposition(c, tol).rank();
}

Index total_kraus_rank(const Instrument& ins, double tol) {
  Index total = 0;
  for (const KrausList& ops : ins.operations)
    total += kraus_rank(ops, ins.dim_in, ins.dim_out, tol);
  return total;
}

ComplexMatrix superoperator(const KrausList& ops, Index dim_in,
                            Index dim_out) {
  ComplexMatrix s = ComplexMatrix::Zero(dim_out * dim_out, dim_in * dim_in);
  for (const ComplexMatrix& k : ops) s.noalias() += kron(k, k.conjugate());
  return s;
}

ComplexMatrix choi_from_superoperator(const ComplexMatrix& s, Index dim_in,
                                      Index dim_out) {
  ComplexMatrix c(dim_in * dim_out, dim_in * dim_out);
  for (Index i = 0; i < dim_out; ++i)
    for (Index a = 0; a < dim_in; ++a)
      for (Index j = 0; j < dim_out; ++j)
        for (Index b = 0; b < dim_in; ++b)
          c(i * dim_in + a, j * dim_in + b) = s(i * dim_out + j, a * dim_in + b);
  return c;
}

std::string join_labels(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ',';
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_label(const std::string& label) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : label) {
    if (c == ',') {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

}  // namespace iqseq
