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

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iqseq/decompose.hpp"
#include "iqseq/examples.hpp"
#include "iqseq/io.hpp"
#include "iqseq/resources.hpp"
#include "iqseq/runtime.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMalformed = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitVerification = 4;

double default_tol() {
  if (const char* env = std::getenv("IQSEQ_TOL")) {
    try {
      return std::stod(env);
    } catch (...) {
      std::cerr << "ignoring unparsable IQSEQ_TOL\n";
    }
  }
  return iqseq::kDefaultTol;
}

struct LoadedTarget {
  iqseq::Instrument instrument;
  std::optional<iqseq::Povm> povm;  // set when the input file was a POVM
};

// Accepts instrument files directly and POVM files through their Lueders
// instrument (the least disturbing realization).
LoadedTarget load_target(const std::string& path, double tol) {
  const iqseq::Json doc = iqseq::load_json(path);
  switch (iqseq::sniff(doc)) {
    case iqseq::FileKind::Instrument:
      return {iqseq::instrument_from_json(doc), std::nullopt};
    case iqseq::FileKind::Povm: {
      iqseq::Povm povm = iqseq::povm_from_json(doc);
      const auto diags = iqseq::validate(povm, tol);
      if (!diags.empty()) {
        std::cerr << iqseq::to_json(diags).dump(2) << "\n";
        throw std::invalid_argument("POVM violates its invariants");
      }
      std::cerr << "note: POVM input; decomposing its Lueders instrument\n";
      return {iqseq::luders(povm, tol), povm};
    }
    default:
      throw iqseq::IoError("", "expected an instrument or POVM file");
  }
}

void require_valid_or_exit(const std::vector<iqseq::Diagnostic>& diags) {
  if (!diags.empty()) {
    std::cerr << iqseq::to_json(diags).dump(2) << "\n";
    std::exit(kExitInvariant);
  }
}

int cmd_validate(const std::string& path, double tol) {
  const iqseq::Json doc = iqseq::load_json(path);
  std::vector<iqseq::Diagnostic> diags;
  switch (iqseq::sniff(doc)) {
    case iqseq::FileKind::Povm:
      diags = iqseq::validate(iqseq::povm_from_json(doc), tol);
      break;
    case iqseq::FileKind::Instrument:
      diags = iqseq::validate(iqseq::instrument_from_json(doc), tol);
      break;
    case iqseq::FileKind::Asi:
      diags = iqseq::validate(iqseq::asi_from_json(doc), tol);
      break;
    case iqseq::FileKind::Stochastic:
      diags = iqseq::validate(iqseq::stochastic_from_json(doc), tol);
      break;
    case iqseq::FileKind::State:
      diags = iqseq::validate(iqseq::state_from_json(doc), tol);
      break;
    default:
      throw iqseq::IoError("", "unrecognized document");
  }
  if (diags.empty()) {
    std::cerr << "ok\n";
    return kExitOk;
  }
  std::cerr << iqseq::to_json(diags).dump(2) << "\n";
  return kExitInvariant;
}

int cmd_decompose(const std::string& path, const std::string& mode,
                  const std::string& postproc_path,
                  const std::vector<std::string>& chain_paths, double tol) {
  const LoadedTarget loaded = [&] {
    if (mode == "povm") {
      const iqseq::Json doc = iqseq::load_json(path);
      if (iqseq::sniff(doc) != iqseq::FileKind::Povm)
        throw iqseq::IoError("", "mode povm expects a POVM file");
      iqseq::Povm povm = iqseq::povm_from_json(doc);
      require_valid_or_exit(iqseq::validate(povm, tol));
      return LoadedTarget{iqseq::povm_as_instrument(povm, tol), povm};
    }
    return load_target(path, tol);
  }();
  require_valid_or_exit(iqseq::validate(loaded.instrument, tol));

  auto load_nu = [&](const std::string& p) {
    const iqseq::Json doc = iqseq::load_json(p);
    iqseq::StochasticMatrix nu = iqseq::stochastic_from_json(doc);
    require_valid_or_exit(iqseq::validate(nu, tol));
    return nu;
  };

  iqseq::AdaptiveSequence asi;
  iqseq::Json extras;
  if (mode == "two-step" || mode == "two-step-reduced") {
    if (postproc_path.empty())
      throw CLI::ValidationError("--postproc is required for " + mode);
    const iqseq::StochasticMatrix nu = load_nu(postproc_path);
    const iqseq::TwoStepDecomposition dec =
        mode == "two-step"
            ? iqseq::two_step(loaded.instrument, nu, std::nullopt, tol)
            : iqseq::two_step_reduced(loaded.instrument, nu, tol);
    asi = dec.as_asi();
    extras["resources"] =
        iqseq::to_json(iqseq::two_step_report(loaded.instrument, dec, tol));
    extras["additional_kraus"] = dec.additional_kraus;
  } else if (mode == "n-step") {
    if (chain_paths.empty())
      throw CLI::ValidationError("--chain is required for n-step");
    std::vector<iqseq::StochasticMatrix> chain;
    for (const std::string& p : chain_paths) chain.push_back(load_nu(p));
    asi = iqseq::n_step(loaded.instrument, chain, tol);
  } else if (mode == "product") {
    asi = iqseq::product_outcomes(loaded.instrument, tol);
  } else if (mode == "min-ancilla") {
    const iqseq::MinAncillaDecomposition dec =
        iqseq::min_ancilla(loaded.instrument, tol);
    asi = dec.asi;
    extras["coarse_map"] = dec.coarse_map;
    extras["detailed_rank"] = dec.detailed_rank;
  } else if (mode == "povm") {
    if (postproc_path.empty())
      throw CLI::ValidationError("--postproc is required for povm");
    const iqseq::PovmTwoStep dec =
        iqseq::povm_two_step(*loaded.povm, load_nu(postproc_path), tol);
    asi = dec.as_asi(tol);
    iqseq::Json conditional = iqseq::Json::array();
    for (const iqseq::Povm& c : dec.conditional)
      conditional.push_back(iqseq::to_json(c));
    extras["conditional_povms"] = std::move(conditional);
  } else {
    throw CLI::ValidationError("unknown mode: " + mode);
  }

  // The target for min-ancilla is the coarse-grained total; compare there.
  iqseq::EquivalenceReport report;
  if (mode == "min-ancilla") {
    const iqseq::Instrument total = iqseq::total_instrument(asi, tol);
    const iqseq::Instrument grained = iqseq::coarse_grain(
        total, extras["coarse_map"].get<std::vector<std::string>>(),
        loaded.instrument.outcomes);
    iqseq::AdaptiveSequence wrapper = iqseq::n_step(grained, {}, tol);
    report = iqseq::verify_equivalence(wrapper, loaded.instrument, tol);
  } else {
    report = iqseq::verify_equivalence(asi, loaded.instrument, tol);
  }
  if (!report.pass) {
    std::cerr << iqseq::to_json(report).dump(2) << "\n";
    std::cerr << "verification failed\n";
    return kExitVerification;
  }

  iqseq::Json out = iqseq::to_json(asi);
  if (!extras.contains("resources")) {
    const iqseq::Instrument total = iqseq::total_instrument(asi, tol);
    extras["resources"] = iqseq::to_json(iqseq::asi_report(asi, total, tol));
  }
  for (auto& [key, value] : extras.items()) out[key] = value;
  out["verification"] = iqseq::to_json(report);
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_resources(const std::string& path, double tol) {
  const iqseq::AdaptiveSequence asi =
      iqseq::asi_from_json(iqseq::load_json(path));
  require_valid_or_exit(iqseq::validate(asi, tol));
  const iqseq::Instrument total = iqseq::total_instrument(asi, tol);
  std::cout << iqseq::to_json(iqseq::asi_report(asi, total, tol)).dump(2)
            << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& path, const std::string& state_path,
                 std::uint64_t shots, std::uint64_t seed,
                 bool record_intermediate, double tol) {
  const iqseq::AdaptiveSequence asi =
      iqseq::asi_from_json(iqseq::load_json(path));
  require_valid_or_exit(iqseq::validate(asi, tol));
  const iqseq::DensityMatrix rho0 =
      iqseq::state_from_json(iqseq::load_json(state_path));
  require_valid_or_exit(iqseq::validate(rho0, 1e-6));
  const iqseq::RunResult result =
      iqseq::run(asi, rho0, shots, seed, record_intermediate);
  std::cout << iqseq::to_json(result.stats).dump(2) << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& path, const std::string& target_path,
               double tol) {
  const iqseq::AdaptiveSequence asi =
      iqseq::asi_from_json(iqseq::load_json(path));
  require_valid_or_exit(iqseq::validate(asi, tol));

  const iqseq::Json doc = iqseq::load_json(target_path);
  iqseq::Instrument target;
  if (iqseq::sniff(doc) == iqseq::FileKind::Instrument) {
    target = iqseq::instrument_from_json(doc);
  } else if (iqseq::sniff(doc) == iqseq::FileKind::Povm) {
    const iqseq::Povm povm = iqseq::povm_from_json(doc);
    target = asi.dims().back() == 1 ? iqseq::povm_as_instrument(povm, tol)
                                    : iqseq::luders(povm, tol);
  } else {
    throw iqseq::IoError("", "expected an instrument or POVM target");
  }
  require_valid_or_exit(iqseq::validate(target, tol));

  const iqseq::EquivalenceReport report =
      iqseq::verify_equivalence(asi, target, tol);
  std::cout << iqseq::to_json(report).dump(2) << "\n";
  return report.pass ? kExitOk : kExitVerification;
}

int cmd_examples(const std::string& name, std::optional<double> alpha,
                 std::optional<double> beta, std::optional<double> eta) {
  std::optional<iqseq::ExampleParams> params;
  if (alpha || beta || eta) {
    iqseq::ExampleParams p = iqseq::ExampleParams::sic();
    if (alpha) p.alpha = *alpha;
    if (beta) p.beta = *beta;
    if (eta) p.eta = *eta;
    p.check();
    params = p;
  }
  const iqseq::GeneratedExample example = iqseq::gen_example(name, params);
  if (example.povm)
    std::cout << iqseq::to_json(*example.povm).dump(2) << "\n";
  else
    std::cout << iqseq::to_json(*example.instrument).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decompose quantum instruments into adaptive sequences, "
               "account their ancilla resources, and verify and simulate the "
               "results."};
  app.require_subcommand(1);
  double tol = default_tol();

  std::string in_path = "-";
  std::string mode = "two-step";
  std::string postproc_path;
  std::vector<std::string> chain_paths;
  std::string state_path;
  std::string target_path;
  std::uint64_t shots = 1024;
  std::uint64_t seed = 0;
  bool record_intermediate = false;
  std::string example_name;
  std::optional<double> alpha, beta, eta;

  auto* validate_cmd = app.add_subcommand("validate", "check file invariants");
  validate_cmd->add_option("file", in_path, "document to check (- for stdin)");
  validate_cmd->add_option("--tol", tol);

  auto* decompose_cmd =
      app.add_subcommand("decompose", "decompose into an adaptive sequence");
  decompose_cmd->add_option("file", in_path, "instrument or POVM file");
  decompose_cmd
      ->add_option("--mode", mode,
                   "two-step | two-step-reduced | n-step | product | "
                   "min-ancilla | povm")
      ->check(CLI::IsMember({"two-step", "two-step-reduced", "n-step",
                             "product", "min-ancilla", "povm"}));
  decompose_cmd->add_option("--postproc", postproc_path,
                            "postprocessing matrix file");
  decompose_cmd->add_option("--chain", chain_paths,
                            "postprocessing chain files, outermost first");
  decompose_cmd->add_option("--tol", tol);

  auto* resources_cmd =
      app.add_subcommand("resources", "resource report of a sequence");
  resources_cmd->add_option("file", in_path, "sequence file");
  resources_cmd->add_option("--tol", tol);

  auto* simulate_cmd =
      app.add_subcommand("simulate", "sample Born-rule trajectories");
  simulate_cmd->add_option("file", in_path, "sequence file");
  simulate_cmd->add_option("--state", state_path, "initial state file")
      ->required();
  simulate_cmd->add_option("--shots", shots);
  simulate_cmd->add_option("--seed", seed);
  simulate_cmd->add_flag("--record-intermediate", record_intermediate);
  simulate_cmd->add_option("--tol", tol);

  auto* verify_cmd =
      app.add_subcommand("verify", "compare a sequence against a target");
  verify_cmd->add_option("file", in_path, "sequence file");
  verify_cmd->add_option("--target", target_path, "target instrument or POVM")
      ->required();
  verify_cmd->add_option("--tol", tol);

  auto* examples_cmd =
      app.add_subcommand("examples", "write a built-in example");
  examples_cmd->add_option("name", example_name,
                           "three-outcome | shrinking | qubit4 | qubit4-sic")
      ->required();
  examples_cmd->add_option("--alpha", alpha, "radians");
  examples_cmd->add_option("--beta", beta, "radians");
  examples_cmd->add_option("--eta", eta, "sharpness");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) return cmd_validate(in_path, tol);
    if (decompose_cmd->parsed())
      return cmd_decompose(in_path, mode, postproc_path, chain_paths, tol);
    if (resources_cmd->parsed()) return cmd_resources(in_path, tol);
    if (simulate_cmd->parsed())
      return cmd_simulate(in_path, state_path, shots, seed,
                          record_intermediate, tol);
    if (verify_cmd->parsed()) return cmd_verify(in_path, target_path, tol);
    if (examples_cmd->parsed())
      return cmd_examples(example_name, alpha, beta, eta);
  } catch (const iqseq::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitOk;
}
