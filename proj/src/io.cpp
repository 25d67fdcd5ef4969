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

#include "iqseq/io.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace iqseq {

namespace {

Json complex_to_json(const Complex& z) {
  return Json::array({z.real(), z.imag()});
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index a = 0; a < m.cols(); ++a) row.push_back(complex_to_json(m(i, a)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json real_matrix_to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index a = 0; a < m.cols(); ++a) row.push_back(m(i, a));
    rows.push_back(std::move(row));
  }
  return rows;
}

const Json& require(const Json& j, const char* key, const std::string& at) {
  if (!j.is_object()) throw IoError(at, "expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw IoError(at + "/" + key, "missing required field");
  return *it;
}

double as_number(const Json& j, const std::string& at) {
  if (!j.is_number()) throw IoError(at, "expected a number");
  return j.get<double>();
}

Index as_index(const Json& j, const std::string& at) {
  if (!j.is_number_integer()) throw IoError(at, "expected an integer");
  return j.get<Index>();
}

std::vector<std::string> as_labels(const Json& j, const std::string& at) {
  if (!j.is_array()) throw IoError(at, "expected an array of labels");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& item = j[i];
    if (!item.is_string())
      throw IoError(at + "/" + std::to_string(i), "expected a string label");
    out.push_back(item.get<std::string>());
  }
  return out;
}

Complex complex_from_json(const Json& j, const std::string& at) {
  if (!j.is_array() || j.size() != 2)
    throw IoError(at, "expected a [re, im] pair");
  return {as_number(j[0], at + "/0"), as_number(j[1], at + "/1")};
}

ComplexMatrix matrix_from_json(const Json& j, Index rows, Index cols,
                               const std::string& at) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw IoError(at, "expected a matrix with " + std::to_string(rows) +
                          " rows");
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[i];
    const std::string row_at = at + "/" + std::to_string(i);
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw IoError(row_at, "expected a row of " + std::to_string(cols) +
                                " entries");
    for (Index a = 0; a < cols; ++a)
      m(i, a) = complex_from_json(row[a], row_at + "/" + std::to_string(a));
  }
  return m;
}

}  // namespace

Json to_json(const Povm& povm) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["type"] = "povm";
  j["dim"] = povm.dim;
  j["outcomes"] = povm.outcomes;
  Json effects = Json::array();
  for (const ComplexMatrix& e : povm.effects) effects.push_back(matrix_to_json(e));
  j["effects"] = std::move(effects);
  return j;
}

Json to_json(const Instrument& ins) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["type"] = "instrument";
  j["dim_in"] = ins.dim_in;
  j["dim_out"] = ins.dim_out;
  j["outcomes"] = ins.outcomes;
  Json operations = Json::array();
  for (const KrausList& ops : ins.operations) {
    Json op = Json::array();
    for (const ComplexMatrix& k : ops) op.push_back(matrix_to_json(k));
    operations.push_back(std::move(op));
  }
  j["operations"] = std::move(operations);
  return j;
}

Json to_json(const StochasticMatrix& nu) {
  Json j;
  j["rows"] = nu.rows;
  j["cols"] = nu.cols;
  j["matrix"] = real_matrix_to_json(nu.matrix);
  return j;
}

Json to_json(const AdaptiveSequence& asi) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["type"] = "asi";
  j["dims"] = asi.dims();
  Json outcome_sets = Json::array();
  for (Index k = 1; k <= asi.num_steps(); ++k)
    outcome_sets.push_back(asi.outcomes_at_step(k));
  j["outcome_sets"] = std::move(outcome_sets);
  Json steps = Json::array();
  for (const AdaptiveStep& step : asi.steps) {
    Json table;
    for (std::size_t t = 0; t < step.keys.size(); ++t) {
      Json body = to_json(step.instruments[t]);
      body.erase("format_version");
      body.erase("type");
      table[step.keys[t]] = std::move(body);
    }
    steps.push_back(Json{{"table", std::move(table)}});
  }
  j["steps"] = std::move(steps);
  return j;
}

Json to_json(const DensityMatrix& state) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["type"] = "state";
  j["dim"] = state.rho.rows();
  j["rho"] = matrix_to_json(state.rho);
  return j;
}

Json to_json(const ResourceReport& report) {
  Json j;
  j["g"] = report.g;
  j["ranks"] = report.ranks;
  j["total_rank"] = report.total_rank;
  j["m"] = report.m;
  j["ancilla_dim"] = report.ancilla_dim;
  j["ancilla_qubits"] = report.ancilla_qubits;
  j["steps"] = report.steps;
  j["dims"] = report.dims;
  j["step_ancilla"] = report.step_ancilla;
  j["min_steps_bound"] = report.min_steps_bound;
  j["tradeoff_bound"] = report.tradeoff_bound;
  j["rank_bound"] = report.rank_bound;
  j["rank_bound_satisfied"] = report.rank_bound_satisfied;
  j["tradeoff_satisfied"] = report.tradeoff_satisfied;
  return j;
}

Json to_json(const RunStatistics& stats) {
  Json j;
  j["shots"] = stats.shots;
  j["seed"] = stats.seed;
  Json counts = Json::array();
  Json freqs = Json::array();
  for (const auto& [label, n] : stats.final_counts) {
    counts.push_back(Json::array({label, n}));
    freqs.push_back(Json::array(
        {label, static_cast<double>(n) / static_cast<double>(stats.shots)}));
  }
  j["counts"] = std::move(counts);
  j["frequencies"] = std::move(freqs);
  if (stats.intermediate_recorded) {
    Json seq = Json::array();
    for (const auto& [label, n] : stats.sequence_counts)
      seq.push_back(Json::array({label, n}));
    j["sequence_counts"] = std::move(seq);
  }
  j["renormalized_branches"] = stats.renormalized_branches;
  return j;
}

Json to_json(const EquivalenceReport& report) {
  Json j;
  Json per = Json::array();
  for (const auto& check : report.per_outcome)
    per.push_back(Json::array({check.label, check.choi_distance}));
  j["per_outcome_choi_distance"] = std::move(per);
  j["max_choi_distance"] = report.max_choi_distance;
  j["induced_povm_distance"] = report.povm_distance;
  j["induced_channel_distance"] = report.channel_distance;
  j["tolerance"] = report.tolerance;
  j["pass"] = report.pass;
  return j;
}

Json to_json(const std::vector<Diagnostic>& diags) {
  Json j = Json::array();
  for (const Diagnostic& d : diags)
    j.push_back(Json{{"code", d.code},
                     {"message", d.message},
                     {"residual", d.residual}});
  return j;
}

Povm povm_from_json(const Json& j, const std::string& at) {
  Povm povm;
  povm.dim = as_index(require(j, "dim", at), at + "/dim");
  povm.outcomes = as_labels(require(j, "outcomes", at), at + "/outcomes");
  const Json& effects = require(j, "effects", at);
  if (!effects.is_array() || effects.size() != povm.outcomes.size())
    throw IoError(at + "/effects", "expected one effect per outcome");
  for (std::size_t i = 0; i < effects.size(); ++i)
    povm.effects.push_back(matrix_from_json(
        effects[i], povm.dim, povm.dim,
        at + "/effects/" + std::to_string(i)));
  return povm;
}

Instrument instrument_from_json(const Json& j, const std::string& at) {
  Instrument ins;
  ins.dim_in = as_index(require(j, "dim_in", at), at + "/dim_in");
  ins.dim_out = as_index(require(j, "dim_out", at), at + "/dim_out");
  ins.outcomes = as_labels(require(j, "outcomes", at), at + "/outcomes");
  const Json& operations = require(j, "operations", at);
  if (!operations.is_array() || operations.size() != ins.outcomes.size())
    throw IoError(at + "/operations", "expected one operation per outcome");
  for (std::size_t i = 0; i < operations.size(); ++i) {
    const Json& op = operations[i];
    const std::string op_at = at + "/operations/" + std::to_string(i);
    if (!op.is_array()) throw IoError(op_at, "expected a list of matrices");
    KrausList ops;
    for (std::size_t m = 0; m < op.size(); ++m)
      ops.push_back(matrix_from_json(op[m], ins.dim_out, ins.dim_in,
                                     op_at + "/" + std::to_string(m)));
    ins.operations.push_back(std::move(ops));
  }
  return ins;
}

StochasticMatrix stochastic_from_json(const Json& j, const std::string& at) {
  StochasticMatrix nu;
  nu.rows = as_labels(require(j, "rows", at), at + "/rows");
  nu.cols = as_labels(require(j, "cols", at), at + "/cols");
  const Json& matrix = require(j, "matrix", at);
  if (!matrix.is_array() || matrix.size() != nu.rows.size())
    throw IoError(at + "/matrix", "expected one row per row label");
  nu.matrix.resize(nu.rows.size(), nu.cols.size());
  for (std::size_t k = 0; k < matrix.size(); ++k) {
    const Json& row = matrix[k];
    const std::string row_at = at + "/matrix/" + std::to_string(k);
    if (!row.is_array() || row.size() != nu.cols.size())
      throw IoError(row_at, "expected one entry per column label");
    for (std::size_t c = 0; c < row.size(); ++c)
      nu.matrix(k, c) = as_number(row[c], row_at + "/" + std::to_string(c));
  }
  return nu;
}

AdaptiveSequence asi_from_json(const Json& j, const std::string& at) {
  AdaptiveSequence asi;
  const Json& dims = require(j, "dims", at);
  if (!dims.is_array() || dims.size() < 2)
    throw IoError(at + "/dims", "expected dims d_0..d_N");
  std::vector<Index> d;
  for (std::size_t i = 0; i < dims.size(); ++i)
    d.push_back(as_index(dims[i], at + "/dims/" + std::to_string(i)));
  asi.dim0 = d[0];

  const Json& outcome_sets = require(j, "outcome_sets", at);
  const Json& steps = require(j, "steps", at);
  if (!steps.is_array() || steps.size() + 1 != dims.size())
    throw IoError(at + "/steps", "expected one step per dims link");
  if (!outcome_sets.is_array() || outcome_sets.size() != steps.size())
    throw IoError(at + "/outcome_sets", "expected one outcome set per step");

  std::vector<std::string> keys{"1"};
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const std::string step_at = at + "/steps/" + std::to_string(s);
    const Json& table = require(steps[s], "table", step_at);
    if (!table.is_object()) throw IoError(step_at + "/table", "expected a table");
    AdaptiveStep step;
    step.dim_out = d[s + 1];
    step.keys = keys;
    for (const std::string& key : keys) {
      auto it = table.find(key);
      if (it == table.end())
        throw IoError(step_at + "/table/" + key, "missing table entry");
      step.instruments.push_back(
          instrument_from_json(*it, step_at + "/table/" + key));
    }
    keys = as_labels(outcome_sets[s],
                     at + "/outcome_sets/" + std::to_string(s));
    asi.steps.push_back(std::move(step));
  }
  return asi;
}

DensityMatrix state_from_json(const Json& j, const std::string& at) {
  const Index dim = as_index(require(j, "dim", at), at + "/dim");
  DensityMatrix state;
  state.rho = matrix_from_json(require(j, "rho", at), dim, dim, at + "/rho");
  return state;
}

FileKind sniff(const Json& j) {
  if (!j.is_object()) return FileKind::Unknown;
  if (j.contains("steps") && j.contains("dims")) return FileKind::Asi;
  if (j.contains("operations")) return FileKind::Instrument;
  if (j.contains("effects")) return FileKind::Povm;
  if (j.contains("rho")) return FileKind::State;
  if (j.contains("rows") && j.contains("cols") && j.contains("matrix"))
    return FileKind::Stochastic;
  return FileKind::Unknown;
}

Json load_json(const std::string& path) {
  std::string text;
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    text = buffer.str();
  } else {
    std::ifstream in(path);
    if (!in) throw IoError("", "cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("byte " + std::to_string(e.byte),
                  std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace iqseq
