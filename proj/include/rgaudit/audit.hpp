// Copyright 2026 The rgaudit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RGAUDIT_AUDIT_HPP
#define RGAUDIT_AUDIT_HPP

#include <algorithm>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fim.hpp"
#include "io.hpp"
#include "mcrg.hpp"
#include "task.hpp"

namespace rgaudit {

/// Settings shared by the CLI commands. Unset paths are empty strings.
struct RunConfig {
  std::uint64_t seed = 1;
  int enumeration_limit = kDefaultEnumerationLimit;

  // gen-data
  int n_in = 8;
  int n_classes = 2;
  double flip_noise = 0.1;
  std::int64_t n_samples = 1000;

  // train
  std::vector<int> layer_sizes = {8, 2};
  int cd_steps = 1;
  double learning_rate = 0.1;
  int epochs = 30;
  int batch_size = 10;
  double init_scale = 0.01;
  int eval_chains = 256;

  // audit
  std::int64_t n_chains = 100000;
  int max_degree = 2;
  double regularization = 1e-6;
  double relevance_margin = 0.05;
  int bootstrap_resamples = 200;
  int bootstrap_batches = 256;
  bool exact_moments = false;
  std::string jacobian_method = "analytic";
  std::vector<double> epsilons = {0.01, 0.02, 0.05, 0.1};
  std::int64_t attack_chains = 100000;
  int kl_bootstrap = 50;
  int bits_to_flip = 3;

  json oracle = json::object();  // oracle-check settings, see OracleConfig

  std::string model_path;
  std::string data_path;
  std::string inputs_path;
  std::string out;

  void validate() const {
    require(enumeration_limit >= 1 && enumeration_limit <= 30,
            "config: enumeration_limit must lie in [1, 30]");
    require(n_in >= 1 && n_classes >= 1 && n_samples >= 1,
            "config: n_in, n_classes and n_samples must be positive");
    require(!layer_sizes.empty(), "config: layer_sizes must not be empty");
    for (int w : layer_sizes) require(w >= 1, "config: layer sizes must be positive");
    require(cd_steps >= 1 && epochs >= 0 && batch_size >= 1 && eval_chains >= 1,
            "config: training counts must be positive");
    require(n_chains >= 1 && attack_chains >= 1, "config: chain counts must be positive");
    require(max_degree >= 1, "config: max_degree must be >= 1");
    require(regularization >= 0.0, "config: regularization must be non-negative");
    require(relevance_margin >= 0.0, "config: relevance_margin must be non-negative");
    require(bootstrap_resamples >= 0 && bootstrap_batches >= 1 && kl_bootstrap >= 0,
            "config: bootstrap counts must be non-negative");
    require(!epsilons.empty(), "config: at least one epsilon required");
    for (double e : epsilons) require(e > 0.0, "config: epsilons must be positive");
    parse_jacobian_method(jacobian_method);
  }
};

inline json to_json(const RunConfig &c) {
  return {{"seed", c.seed},
          {"enumeration_limit", c.enumeration_limit},
          {"n_in", c.n_in},
          {"n_classes", c.n_classes},
          {"flip_noise", c.flip_noise},
          {"n_samples", c.n_samples},
          {"layer_sizes", c.layer_sizes},
          {"cd_steps", c.cd_steps},
          {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"init_scale", c.init_scale},
          {"eval_chains", c.eval_chains},
          {"n_chains", c.n_chains},
          {"max_degree", c.max_degree},
          {"regularization", c.regularization},
          {"relevance_margin", c.relevance_margin},
          {"bootstrap_resamples", c.bootstrap_resamples},
          {"bootstrap_batches", c.bootstrap_batches},
          {"exact_moments", c.exact_moments},
          {"jacobian_method", c.jacobian_method},
          {"epsilons", c.epsilons},
          {"attack_chains", c.attack_chains},
          {"kl_bootstrap", c.kl_bootstrap},
          {"bits_to_flip", c.bits_to_flip},
          {"oracle", c.oracle},
          {"model", c.model_path},
          {"data", c.data_path},
          {"inputs", c.inputs_path},
          {"out", c.out}};
}

/// Reads the keys present in `j` over the defaults; unknown keys are errors.
inline RunConfig run_config_from_json(const json &j, RunConfig c = {}) {
  if (!j.is_object()) throw SchemaError("config: expected a JSON object");
  static const std::set<std::string> known = [] {
    std::set<std::string> keys;
    const json defaults = to_json(RunConfig{});
    for (const auto &[k, v] : defaults.items()) keys.insert(k);
    return keys;
  }();
  for (const auto &[key, value] : j.items())
    if (!known.count(key)) throw SchemaError("config: unknown key '" + key + "'");
  try {
    auto get = [&](const char *key, auto &field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("seed", c.seed);
    get("enumeration_limit", c.enumeration_limit);
    get("n_in", c.n_in);
    get("n_classes", c.n_classes);
    get("flip_noise", c.flip_noise);
    get("n_samples", c.n_samples);
    get("layer_sizes", c.layer_sizes);
    get("cd_steps", c.cd_steps);
    get("learning_rate", c.learning_rate);
    get("epochs", c.epochs);
    get("batch_size", c.batch_size);
    get("init_scale", c.init_scale);
    get("eval_chains", c.eval_chains);
    get("n_chains", c.n_chains);
    get("max_degree", c.max_degree);
    get("regularization", c.regularization);
    get("relevance_margin", c.relevance_margin);
    get("bootstrap_resamples", c.bootstrap_resamples);
    get("bootstrap_batches", c.bootstrap_batches);
    get("exact_moments", c.exact_moments);
    get("jacobian_method", c.jacobian_method);
    get("epsilons", c.epsilons);
    get("attack_chains", c.attack_chains);
    get("kl_bootstrap", c.kl_bootstrap);
    get("bits_to_flip", c.bits_to_flip);
    get("oracle", c.oracle);
    get("model", c.model_path);
    get("data", c.data_path);
    get("inputs", c.inputs_path);
    get("out", c.out);
  } catch (const json::exception &e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  return c;
}

inline RunConfig load_run_config(const std::string &path) {
  return run_config_from_json(parse_json_file(path));
}

inline TrainConfig train_config(const RunConfig &c) {
  TrainConfig t;
  t.layer_sizes = c.layer_sizes;
  t.cd_steps = c.cd_steps;
  t.learning_rate = c.learning_rate;
  t.epochs = c.epochs;
  t.batch_size = c.batch_size;
  t.init_scale = c.init_scale;
  t.eval_chains = c.eval_chains;
  t.seed = derive_seed(c.seed, "train");
  return t;
}

inline FlowConfig flow_config(const RunConfig &c) {
  FlowConfig f;
  f.n_chains = c.n_chains;
  f.max_degree = c.max_degree;
  f.regularization = c.regularization;
  f.relevance_margin = c.relevance_margin;
  f.bootstrap_resamples = c.bootstrap_resamples;
  f.bootstrap_batches = c.bootstrap_batches;
  f.exact_moments = c.exact_moments;
  f.enumeration_limit = c.enumeration_limit;
  f.seed = derive_seed(c.seed, "flow");
  return f;
}

inline AttackConfig attack_config(const RunConfig &c, int input_index) {
  AttackConfig a;
  a.n_chains = c.attack_chains;
  a.bits_to_flip = c.bits_to_flip;
  a.kl_bootstrap = c.kl_bootstrap;
  a.enumeration_limit = c.enumeration_limit;
  a.seed = derive_seed(derive_seed(c.seed, "attack"), static_cast<std::uint64_t>(input_index));
  return a;
}

// --- premise check ----------------------------------------------------------------

/// KL(p(.|x) || q_N(.|x)) with q read from the exact output distribution.
inline double premise_kl(const TaskSpec &task, const DeepStack &stack, const BitVector &x,
                         int limit = kDefaultEnumerationLimit) {
  const Vector q_out = exact_output(stack, InputPoint::from_bits(x).coordinates, limit);
  const Vector q = class_distribution(q_out, stack.n_out(), task.n_classes);
  return exact_kl(posterior(task, x), q);
}

/// Task-weighted mean of premise_kl over every binary input.
inline double mean_premise_kl(const TaskSpec &task, const DeepStack &stack,
                              int limit = kDefaultEnumerationLimit) {
  require(task.n_in <= 20, "mean_premise_kl: input too wide to enumerate");
  require(stack.n_in() == task.n_in, "mean_premise_kl: stack and task disagree on n_in");
  double total = 0.0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << task.n_in); ++s) {
    const BitVector x = index_to_bits(s, task.n_in);
    total += input_probability(task, x) * premise_kl(task, stack, x, limit);
  }
  return total;
}

inline std::optional<BitVector> as_bits(const InputPoint &x) {
  BitVector bits;
  for (Eigen::Index i = 0; i < x.coordinates.size(); ++i) {
    if (x.coordinates[i] != 0.0 && x.coordinates[i] != 1.0) return std::nullopt;
    bits.push_back(static_cast<std::uint8_t>(x.coordinates[i]));
  }
  return bits;
}

// --- audit ---------------------------------------------------------------------

struct InputVerdict {
  bool relevant = false;
  bool dominant = false;
  bool vulnerable() const { return relevant && dominant; }
};

/**
  Verdict recomputed from the report bundle alone: an input is vulnerable
  when one of its transitions has a mode with |Lambda| > 1 + margin + stderr
  and the top-direction KL exceeds the control KL at the smallest epsilon.
*/
inline std::string verdict_from_reports(const json &flow, const json &attack,
                                        std::vector<InputVerdict> *per_input = nullptr) {
  const double margin = flow.at("config").at("relevance_margin").get<double>();
  const auto &flows = flow.at("inputs");
  const auto &attacks = attack.at("inputs");
  require(flows.size() == attacks.size(), "verdict: flow and attack reports disagree on inputs");
  bool any = false;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    InputVerdict v;
    for (const auto &t : flows[i].at("transitions"))
      for (const auto &m : t.at("modes"))
        if (m.at("magnitude").get<double>() > 1.0 + margin + m.at("stderr").get<double>())
          v.relevant = true;
    const auto &top = attacks[i].at("top");
    const auto &control = attacks[i].at("control");
    if (!top.empty() && !control.empty())
      v.dominant = top[0].at("kl").get<double>() > control[0].at("kl").get<double>();
    any = any || v.vulnerable();
    if (per_input) per_input->push_back(v);
  }
  return any ? "vulnerable" : "robust";
}

struct AuditResult {
  json flow;
  json fim;
  json attack;
  std::string eigs_csv;
  std::string kl_csv;
  std::string spectrum_csv;
  std::string verdict;
};

inline std::string eigs_csv(const FlowSummary &summary) {
  std::string out = "input,layer,mode_rank,eig_magnitude,eig_phase,stderr,relevant\n";
  for (const auto &r : summary.reports)
    for (const auto &t : r.transitions)
      for (std::size_t m = 0; m < t.modes.size(); ++m)
        out += std::to_string(r.input_index) + "," + std::to_string(t.to_layer) + "," +
               std::to_string(m) + "," + format_number(t.modes[m].magnitude()) + "," +
               format_number(t.modes[m].phase()) + "," +
               format_number(t.modes[m].stderr_magnitude) + "," +
               (t.modes[m].relevant ? "1" : "0") + "\n";
  return out;
}

/**
  Runs flow -> first-layer Jacobian -> chain -> FIM -> attack for every
  input. `flush` receives each stage's partial result as soon as it exists
  (stage name, result so far) so a later failure leaves earlier files.
*/
template <class Flush>
AuditResult run_audit(const DeepStack &stack, const std::vector<InputPoint> &inputs,
                      const RunConfig &config, const std::optional<TaskSpec> &task,
                      Flush &&flush) {
  config.validate();
  stack.validate();
  require(!inputs.empty(), "audit: no inputs");
  for (std::size_t i = 0; i < inputs.size(); ++i)
    require(inputs[i].dimension() == stack.n_in(),
            "audit: input " + std::to_string(i) + " has dimension " +
                std::to_string(inputs[i].dimension()) + ", model expects " +
                std::to_string(stack.n_in()));
  std::vector<double> epsilons = config.epsilons;
  std::sort(epsilons.begin(), epsilons.end());
  const JacobianMethod method = parse_jacobian_method(config.jacobian_method);

  AuditResult result;
  const FlowSummary summary = flow_report(stack, inputs, flow_config(config));
  result.flow = {{"config", to_json(config)}, {"model_depth", stack.depth()}};
  json flows = json::array();
  for (const auto &r : summary.reports) {
    json entry = to_json(r);
    if (task && stack.depth() > 0 && enumerable(stack, config.enumeration_limit)) {
      const auto bits = as_bits(inputs[r.input_index]);
      if (bits && static_cast<int>(bits->size()) == task->n_in &&
          stack.n_out() % task->n_classes == 0)
        entry["premise_kl"] = premise_kl(*task, stack, *bits, config.enumeration_limit);
    }
    flows.push_back(std::move(entry));
  }
  result.flow["inputs"] = flows;
  result.flow["class_summary"] = to_json(summary.classes);
  result.eigs_csv = eigs_csv(summary);
  flush("flow", result);

  std::vector<FimMatrix> fims;
  json fim_inputs = json::array();
  for (const auto &r : summary.reports) {
    const auto &x = inputs[r.input_index];
    const FirstLayerJacobian first =
        first_layer_jacobian(stack.layers[0], r.bases[0], x, method, &r.expectations[0],
                             config.regularization, config.enumeration_limit);
    const Matrix chain = chain_jacobian(first, r.transitions);
    fims.push_back(assemble_fim(chain, r.expectations.back(),
                                static_cast<int>(r.transitions.size())));
    const FimSpectrum s = fim_spectrum(fims.back());
    json entry = {{"input_index", r.input_index},
                  {"method", to_string(method)},
                  {"first_layer_jacobian", to_json(first.matrix)},
                  {"chain_jacobian", to_json(chain)},
                  {"fim", to_json(fims.back())},
                  {"eigenvalues", to_json(s.eigenvalues)},
                  {"eigenvectors", to_json(s.eigenvectors)},
                  {"decay_ratios", decay_ratios(s.eigenvalues)}};
    fim_inputs.push_back(std::move(entry));
    for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
      const auto ratios = decay_ratios(s.eigenvalues);
      result.spectrum_csv += std::to_string(r.input_index) + "," + std::to_string(k) + "," +
                             format_number(s.eigenvalues[k]) + "," +
                             (k + 1 < s.eigenvalues.size() ? format_number(ratios[k]) : "") + "\n";
    }
  }
  result.spectrum_csv = "input,rank,eigenvalue,decay_ratio\n" + result.spectrum_csv;
  result.fim = {{"inputs", fim_inputs}};
  flush("fim", result);

  json attack_inputs = json::array();
  result.kl_csv = "input,direction,epsilon,kl,kl_stderr,class_before,class_after,flipped\n";
  for (std::size_t i = 0; i < summary.reports.size(); ++i) {
    const AdversarialReport report = evaluate_attack(
        stack, inputs[i], fims[i], epsilons, attack_config(config, static_cast<int>(i)));
    json entry = to_json(report);
    entry["input_index"] = static_cast<int>(i);
    attack_inputs.push_back(std::move(entry));
    auto rows = [&](const char *name, const std::vector<PerturbationRecord> &records) {
      for (const auto &p : records)
        result.kl_csv += std::to_string(i) + "," + name + "," + format_number(p.epsilon) + "," +
                         format_number(p.kl) + "," + format_number(p.kl_stderr) + "," +
                         std::to_string(p.class_before) + "," + std::to_string(p.class_after) +
                         "," + (p.flipped ? "1" : "0") + "\n";
    };
    rows("top", report.top);
    rows("control", report.control);
  }
  result.attack = {{"inputs", attack_inputs}};
  std::vector<InputVerdict> verdicts;
  result.verdict = verdict_from_reports(result.flow, result.attack, &verdicts);
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    result.attack["inputs"][i]["relevant"] = verdicts[i].relevant;
    result.attack["inputs"][i]["dominant"] = verdicts[i].dominant;
    result.attack["inputs"][i]["verdict"] = verdicts[i].vulnerable() ? "vulnerable" : "robust";
  }
  result.attack["verdict"] = result.verdict;
  flush("attack", result);
  return result;
}

inline AuditResult run_audit(const DeepStack &stack, const std::vector<InputPoint> &inputs,
                             const RunConfig &config,
                             const std::optional<TaskSpec> &task = std::nullopt) {
  return run_audit(stack, inputs, config, task, [](const char *, const AuditResult &) {});
}

/**
  Audit writing the bundle into `out_dir`. Each stage's files are written as
  soon as the stage finishes; a failure additionally writes error.json
  naming the stage and rethrows.
*/
inline AuditResult audit_to_directory(const DeepStack &stack,
                                      const std::vector<InputPoint> &inputs,
                                      const RunConfig &config,
                                      const std::optional<TaskSpec> &task,
                                      const std::string &out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::remove(fs::path(out_dir) / "error.json");
  std::string stage = "flow";
  auto path = [&](const char *name) { return (fs::path(out_dir) / name).string(); };
  auto flush = [&](const char *done, const AuditResult &r) {
    const std::string name = done;
    if (name == "flow") {
      write_text(path("flow.json"), r.flow.dump(2) + "\n");
      write_text(path("eigs_vs_depth.csv"), r.eigs_csv);
      stage = "fim";
    } else if (name == "fim") {
      write_text(path("fim.json"), r.fim.dump(2) + "\n");
      write_text(path("fim_spectrum.csv"), r.spectrum_csv);
      stage = "attack";
    } else {
      write_text(path("attack.json"), r.attack.dump(2) + "\n");
      write_text(path("kl_vs_eps.csv"), r.kl_csv);
    }
  };
  try {
    return run_audit(stack, inputs, config, task, flush);
  } catch (const std::exception &e) {
    write_text(path("error.json"),
               json{{"stage", stage}, {"message", e.what()}}.dump(2) + "\n");
    throw;
  }
}

}  // namespace rgaudit

#endif  // RGAUDIT_AUDIT_HPP
