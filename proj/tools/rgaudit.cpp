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

// Command-line front end: gen-data, train, audit, oracle-check.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rgaudit/rgaudit.hpp"

namespace {

using rgaudit::RunConfig;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  std::optional<int> max_degree;
  std::string out;
};

void add_common(CLI::App *cmd, Overrides &o) {
  cmd->add_option("--config", o.config, "JSON configuration file");
  cmd->add_option("--seed", o.seed, "root seed");
  cmd->add_option("--samples", o.samples,
                  "gen-data: dataset size; train: evaluation chains; audit/oracle-check: chains");
  cmd->add_option("--max-degree", o.max_degree, "largest operator degree in the basis");
  cmd->add_option("--out", o.out, "output path (file or directory)");
}

RunConfig load(const Overrides &o) {
  RunConfig c = o.config.empty() ? RunConfig{} : rgaudit::load_run_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.max_degree) c.max_degree = *o.max_degree;
  if (!o.out.empty()) c.out = o.out;
  return c;
}

int gen_data(const Overrides &o) {
  RunConfig c = load(o);
  if (o.samples) c.n_samples = *o.samples;
  c.validate();
  const std::string out = c.out.empty() ? "data.jsonl" : c.out;
  const auto task = rgaudit::make_task(c.n_in, c.n_classes, c.flip_noise,
                                       rgaudit::derive_seed(c.seed, "task"));
  rgaudit::write_text(out, rgaudit::dataset_to_jsonl(rgaudit::gen_data(task, c.n_samples)));
  rgaudit::write_text(rgaudit::task_sidecar_path(out),
                      rgaudit::task_to_json(task).dump(2) + "\n");
  std::cout << "wrote " << c.n_samples << " samples to " << out << "\n";
  return 0;
}

int train(const Overrides &o, const std::string &data) {
  RunConfig c = load(o);
  if (o.samples) c.eval_chains = static_cast<int>(*o.samples);
  if (!data.empty()) c.data_path = data;
  c.validate();
  if (c.data_path.empty()) throw rgaudit::ContractError("train: no dataset (--data)");
  const std::string out = c.out.empty() ? "model.json" : c.out;
  const auto dataset = rgaudit::dataset_from_jsonl(rgaudit::read_text(c.data_path), c.data_path);
  const auto result = rgaudit::train_layerwise(dataset, rgaudit::train_config(c));
  rgaudit::save_model(out, result.stack);
  std::cout << "training accuracy " << result.accuracy << "; model written to " << out << "\n";
  return 0;
}

int audit(const Overrides &o, const std::string &model, const std::string &inputs) {
  RunConfig c = load(o);
  if (o.samples) c.n_chains = c.attack_chains = *o.samples;
  if (!model.empty()) c.model_path = model;
  if (!inputs.empty()) c.inputs_path = inputs;
  c.validate();
  if (c.model_path.empty()) throw rgaudit::ContractError("audit: no model (--model)");
  if (c.inputs_path.empty()) throw rgaudit::ContractError("audit: no inputs (--inputs)");
  const std::string out = c.out.empty() ? "report" : c.out;
  const auto stack = rgaudit::load_model(c.model_path);
  const auto points = rgaudit::inputs_from_jsonl(rgaudit::read_text(c.inputs_path), c.inputs_path);
  std::optional<rgaudit::TaskSpec> task;
  const std::string sidecar = rgaudit::task_sidecar_path(c.inputs_path);
  if (std::filesystem::exists(sidecar))
    task = rgaudit::task_from_json(rgaudit::parse_json_file(sidecar));
  const auto result = rgaudit::audit_to_directory(stack, points, c, task, out);
  std::cout << "verdict: " << result.verdict << " (report in " << out << ")\n";
  return 0;
}

int oracle_check(const Overrides &o) {
  RunConfig c = load(o);
  rgaudit::OracleConfig oc = rgaudit::oracle_config_from_json(c.oracle);
  oc.seed = c.seed;
  oc.enumeration_limit = c.enumeration_limit;
  if (o.samples) oc.n_chains = *o.samples;
  if (o.max_degree) oc.max_degree = *o.max_degree;
  const auto records = rgaudit::oracle_check(oc);
  rgaudit::json summary = rgaudit::json::array();
  bool all = true;
  for (const auto &r : records) {
    summary.push_back(rgaudit::to_json(r));
    all = all && r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.op << "  err=" << r.max_abs_err
              << "  tol=" << r.tolerance << "\n";
  }
  const std::string out = c.out.empty() ? "oracle_report.json" : c.out;
  rgaudit::write_text(out, rgaudit::json{{"pass", all}, {"records", summary}}.dump(2) + "\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"rgaudit: renormalisation-group audit of deep RBM stacks"};
  app.require_subcommand(1);
  Overrides o;
  std::string data, model, inputs;

  auto *gen = app.add_subcommand("gen-data", "generate a prototype-noise dataset and task sidecar");
  add_common(gen, o);
  auto *tr = app.add_subcommand("train", "greedy layerwise training on a dataset");
  add_common(tr, o);
  tr->add_option("--data", data, "dataset (JSON lines)");
  auto *au = app.add_subcommand("audit", "MCRG flow, FIM and attack report for inputs");
  add_common(au, o);
  au->add_option("--model", model, "model file (JSON)");
  au->add_option("--inputs,--data", inputs, "inputs (JSON lines with \"x\" and optional \"y\")");
  auto *oc = app.add_subcommand("oracle-check", "exact-vs-estimate oracle suite");
  add_common(oc, o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (gen->parsed()) return gen_data(o);
    if (tr->parsed()) return train(o, data);
    if (au->parsed()) return audit(o, model, inputs);
    return oracle_check(o);
  } catch (const rgaudit::EnumerationLimitError &e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const rgaudit::SchemaError &e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const rgaudit::ContractError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
