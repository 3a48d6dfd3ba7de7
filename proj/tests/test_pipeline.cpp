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

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "rgaudit/rgaudit.hpp"

namespace rgaudit {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("rgaudit_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path &p) { return read_text(p.string()); }

int run_cli(const std::string &args, const fs::path &log) {
  const std::string cmd = std::string(RGAUDIT_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig quick_config() {
  RunConfig c;
  c.n_chains = 20000;
  c.attack_chains = 20000;
  c.bootstrap_resamples = 20;
  c.kl_bootstrap = 10;
  return c;
}

// --- task -------------------------------------------------------------------------

TEST(Task, NoiselessPosteriorIsOneHot) {
  const TaskSpec t = make_task(6, 3, 0.0, 4);
  for (int c = 0; c < 3; ++c) {
    const Vector p = posterior(t, t.prototypes[c]);
    EXPECT_NEAR(p[c], 1.0, 1e-15);
    EXPECT_NEAR(p.sum(), 1.0, 1e-15);
  }
}

TEST(Task, PosteriorSumsToOneAndFavorsNearest) {
  const TaskSpec t = make_task(8, 2, 0.1, 4);
  const Vector p = posterior(t, t.prototypes[1]);
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  EXPECT_GT(p[1], p[0]);
  double total = 0.0;
  for (std::uint64_t s = 0; s < 256; ++s) total += input_probability(t, index_to_bits(s, 8));
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Task, FlipRateWithinThreeSigma) {
  const TaskSpec t = make_task(10, 2, 0.2, 8);
  const auto data = gen_data(t, 5000);
  double flips = 0.0;
  for (const auto &s : data) flips += hamming(s.x, t.prototypes[s.y]);
  const double n = 5000.0 * 10;
  const double sigma = std::sqrt(0.2 * 0.8 / n);
  EXPECT_NEAR(flips / n, 0.2, 3 * sigma);
}

TEST(Task, NoiselessDataMatchesPrototypes) {
  const TaskSpec t = make_task(5, 2, 0.0, 8);
  for (const auto &s : gen_data(t, 100)) EXPECT_EQ(s.x, t.prototypes[s.y]);
}

TEST(Task, BadSpecRejected) {
  EXPECT_THROW(make_task(4, 2, 0.5, 1), ContractError);
  EXPECT_THROW(make_task(0, 2, 0.1, 1), ContractError);
}

// --- io ---------------------------------------------------------------------------

TEST(Io, ModelRoundTripIsExact) {
  Rng rng(3);
  DeepStack s = random_stack({4, 3, 2}, 1.0, rng);
  s.meta.n_classes = 2;
  s.meta.train_accuracy = 0.875;
  const DeepStack back = model_from_json(json::parse(model_to_json(s).dump()));
  ASSERT_EQ(back.depth(), 2);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(back.layers[k].weights, s.layers[k].weights);
    EXPECT_EQ(back.layers[k].hidden_bias, s.layers[k].hidden_bias);
  }
  EXPECT_EQ(back.meta.n_classes, 2);
  EXPECT_EQ(*back.meta.train_accuracy, 0.875);
}

TEST(Io, ModelSchemaErrorsNameTheField) {
  auto message = [](const std::string &text) {
    try {
      model_from_json(json::parse(text));
    } catch (const SchemaError &e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"layers": [{"W": [[1, "x"]], "a": [0]}]})").find("model.layers[0].W[0][1]"),
            std::string::npos);
  EXPECT_NE(message(R"({"layers": [{"W": [[1, 2]]}]})").find("'a'"), std::string::npos);
  EXPECT_NE(message(R"({"layers": [{"W": [[1, 2]], "a": [0]}, {"W": [[1, 2]], "a": [0]}]})")
                .find("layer 2"),
            std::string::npos);
}

TEST(Io, DatasetRoundTrip) {
  const auto data = gen_data(make_task(6, 2, 0.1, 2), 50);
  const auto back = dataset_from_jsonl(dataset_to_jsonl(data));
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].x, data[i].x);
    EXPECT_EQ(back[i].y, data[i].y);
  }
}

TEST(Io, JsonlErrorsCarryLineNumbers) {
  auto message = [](const std::string &text) {
    try {
      inputs_from_jsonl(text, "in.jsonl");
    } catch (const SchemaError &e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("{\"x\": [0, 1]}\n{\"x\": [0, 1.5]}\n").find("in.jsonl:2"), std::string::npos);
  EXPECT_NE(message("{\"x\": [0, 1]}\n\n{\"x\": [0]}\n").find("in.jsonl:3"), std::string::npos);
  EXPECT_NE(message("{\"x\": [0, 1]}\nnot json\n").find("in.jsonl:2"), std::string::npos);
  EXPECT_THROW(dataset_from_jsonl("{\"x\": [0, 0.5], \"y\": 0}\n"), SchemaError);
  EXPECT_THROW(dataset_from_jsonl("{\"x\": [0, 1]}\n"), SchemaError);
}

TEST(Io, TaskRoundTrip) {
  const TaskSpec t = make_task(7, 3, 0.15, 9);
  const TaskSpec back = task_from_json(json::parse(task_to_json(t).dump()));
  EXPECT_EQ(back.prototypes, t.prototypes);
  EXPECT_EQ(back.priors, t.priors);
  EXPECT_EQ(back.flip_noise, t.flip_noise);
}

// --- config -----------------------------------------------------------------------

TEST(Config, DefaultsAndOverrides) {
  const RunConfig c = run_config_from_json(json::parse(R"({"seed": 9, "max_degree": 3})"));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.max_degree, 3);
  EXPECT_EQ(c.layer_sizes, (std::vector<int>{8, 2}));
  const RunConfig back = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(run_config_from_json(json::parse(R"({"n_chain": 5})")), SchemaError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"seed": "one"})")), SchemaError);
}

TEST(Config, InvalidValuesRejected) {
  RunConfig c;
  c.epsilons = {0.0};
  EXPECT_THROW(c.validate(), ContractError);
  c = RunConfig{};
  c.jacobian_method = "adjoint";
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(Config, SeedsDifferPerStage) {
  const RunConfig c;
  EXPECT_NE(train_config(c).seed, flow_config(c).seed);
  EXPECT_NE(attack_config(c, 0).seed, attack_config(c, 1).seed);
}

TEST(Config, ShippedConfigsLoad) {
  int found = 0;
  for (const auto &entry : fs::directory_iterator(RGAUDIT_CONFIGS)) {
    if (!entry.path().filename().string().ends_with(".config.json")) continue;
    ++found;
    EXPECT_NO_THROW(load_run_config(entry.path().string()).validate()) << entry.path();
  }
  EXPECT_GE(found, 2);
}

// --- premise KL ---------------------------------------------------------------------

TEST(PremiseKl, ZeroForPosteriorMatchingStack) {
  // Two output units whose code probabilities reproduce the posterior of a
  // one-bit task.
  TaskSpec t;
  t.n_in = 1;
  t.n_classes = 2;
  t.prototypes = {{0}, {1}};
  t.priors = {0.5, 0.5};
  t.flip_noise = 0.2;
  // Class codes are (1,0) and (0,1); their probability ratio is exp(f1 - f0).
  const double w = std::log(0.8 / 0.2);
  DeepStack s;
  Matrix wm(2, 1);
  wm << -w, w;
  Vector a(2);
  a << w / 2, -w / 2;
  s.layers.emplace_back(wm, a, Vector::Zero(1));
  EXPECT_NEAR(premise_kl(t, s, {1}), 0.0, 1e-12);
  EXPECT_NEAR(premise_kl(t, s, {0}), 0.0, 1e-12);
  EXPECT_NEAR(mean_premise_kl(t, s), 0.0, 1e-12);
}

TEST(PremiseKl, TrainingReducesMismatch) {
  const TaskSpec t = make_task(6, 2, 0.1, 7);
  TrainConfig tc;
  tc.layer_sizes = {6, 2};
  tc.epochs = 20;
  const auto trained = train_layerwise(gen_data(t, 600), tc).stack;
  const auto untrained = untrained_stack(6, 2, tc);
  EXPECT_LT(mean_premise_kl(t, trained), mean_premise_kl(t, untrained));
}

// --- audit ------------------------------------------------------------------------

DeepStack identity_model() {
  DeepStack s;
  s.layers.push_back(identity_like_kernel(3, 4.0));
  return s;
}

TEST(Audit, SingleLayerIdentityModelIsRobust) {
  const auto r = run_audit(identity_model(), {InputPoint(Vector::Constant(3, 0.5))},
                           quick_config());
  EXPECT_EQ(r.verdict, "robust");
  EXPECT_EQ(r.flow["inputs"][0]["transitions"].size(), 0u);
}

TEST(Audit, EngineeredStackIsVulnerable) {
  const auto r = run_audit(engineered_relevant_stack(), {engineered_input()}, quick_config());
  EXPECT_EQ(r.verdict, "vulnerable");
  const auto &a = r.attack["inputs"][0];
  EXPECT_TRUE(a["relevant"].get<bool>());
  EXPECT_TRUE(a["dominant"].get<bool>());
  EXPECT_GT(a["top"][0]["kl"].get<double>(), a["control"][0]["kl"].get<double>());
}

TEST(Audit, VerdictRecomputableFromBundle) {
  const auto dir = scratch("recompute");
  const auto r = audit_to_directory(engineered_relevant_stack(), {engineered_input()},
                                    quick_config(), std::nullopt, dir.string());
  const json flow = parse_json_file((dir / "flow.json").string());
  const json attack = parse_json_file((dir / "attack.json").string());
  EXPECT_EQ(verdict_from_reports(flow, attack), r.verdict);
  EXPECT_EQ(attack["verdict"].get<std::string>(), r.verdict);
  for (const char *f : {"flow.json", "eigs_vs_depth.csv", "fim.json", "fim_spectrum.csv",
                        "attack.json", "kl_vs_eps.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_FALSE(fs::exists(dir / "error.json"));
}

TEST(Audit, SameSeedGivesIdenticalBytes) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::vector<InputPoint> inputs = {engineered_input(),
                                          InputPoint(Vector::Constant(3, 0.2))};
  audit_to_directory(engineered_relevant_stack(), inputs, quick_config(), std::nullopt, a.string());
  audit_to_directory(engineered_relevant_stack(), inputs, quick_config(), std::nullopt, b.string());
  for (const auto &entry : fs::directory_iterator(a))
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
}

TEST(Audit, CsvHeaders) {
  const auto r = run_audit(engineered_relevant_stack(), {engineered_input()}, quick_config());
  EXPECT_EQ(r.eigs_csv.substr(0, r.eigs_csv.find('\n')),
            "input,layer,mode_rank,eig_magnitude,eig_phase,stderr,relevant");
  EXPECT_EQ(r.kl_csv.substr(0, r.kl_csv.find('\n')),
            "input,direction,epsilon,kl,kl_stderr,class_before,class_after,flipped");
  EXPECT_EQ(r.spectrum_csv.substr(0, r.spectrum_csv.find('\n')),
            "input,rank,eigenvalue,decay_ratio");
}

TEST(Audit, FailureWritesErrorFile) {
  const auto dir = scratch("failure");
  EXPECT_THROW(audit_to_directory(engineered_relevant_stack(), {InputPoint(Vector::Zero(2))},
                                  quick_config(), std::nullopt, dir.string()),
               ContractError);
  const json err = parse_json_file((dir / "error.json").string());
  EXPECT_EQ(err["stage"], "flow");
  EXPECT_NE(err["message"].get<std::string>().find("dimension"), std::string::npos);
}

TEST(Audit, PremiseKlRecordedWithTask) {
  const TaskSpec t = make_task(3, 3, 0.1, 5);
  const auto r = run_audit(engineered_relevant_stack(), {InputPoint::from_bits(t.prototypes[0], 0)},
                           quick_config(), t);
  EXPECT_TRUE(r.flow["inputs"][0].contains("premise_kl"));
  EXPECT_GE(r.flow["inputs"][0]["premise_kl"].get<double>(), 0.0);
}

// --- CLI --------------------------------------------------------------------------

TEST(Cli, EndToEndGenTrainAudit) {
  const auto dir = scratch("cli");
  const auto cfg = dir / "config.json";
  write_text(cfg.string(), R"({"n_in": 6, "layer_sizes": [4, 2], "epochs": 5,
    "n_chains": 5000, "attack_chains": 5000, "bootstrap_resamples": 10, "kl_bootstrap": 5})");
  const auto data = dir / "data.jsonl";
  const auto model = dir / "model.json";
  const auto report = dir / "report";
  ASSERT_EQ(run_cli("gen-data --config " + cfg.string() + " --samples 200 --out " +
                        data.string(), dir / "gen.log"), 0);
  EXPECT_TRUE(fs::exists(task_sidecar_path(data.string())));
  ASSERT_EQ(run_cli("train --config " + cfg.string() + " --data " + data.string() + " --out " +
                        model.string(), dir / "train.log"), 0);
  ASSERT_EQ(run_cli("audit --config " + cfg.string() + " --model " + model.string() +
                        " --inputs " + data.string() + " --out " + report.string(),
                    dir / "audit.log"),
            0)
      << slurp(dir / "audit.log");
  EXPECT_NE(slurp(dir / "audit.log").find("verdict: "), std::string::npos);
  EXPECT_TRUE(fs::exists(report / "attack.json"));
}

TEST(Cli, EnumerationRefusalNamesLayer) {
  const auto dir = scratch("refuse");
  const auto cfg = dir / "config.json";
  write_text(cfg.string(), R"({"enumeration_limit": 2, "oracle": {"n_kernels": 1}})");
  EXPECT_EQ(run_cli("oracle-check --config " + cfg.string() + " --out " +
                        (dir / "o.json").string(), dir / "log"), 3);
  EXPECT_NE(slurp(dir / "log").find("layer"), std::string::npos);
}

TEST(Cli, SchemaErrorExitCode) {
  const auto dir = scratch("schema");
  write_text((dir / "model.json").string(), R"({"layers": []})");
  write_text((dir / "in.jsonl").string(), "{\"x\": [0]}\n");
  EXPECT_EQ(run_cli("audit --model " + (dir / "model.json").string() + " --inputs " +
                        (dir / "in.jsonl").string() + " --out " + (dir / "r").string(),
                    dir / "log"),
            2);
  EXPECT_NE(slurp(dir / "log").find("model.layers"), std::string::npos);
}

TEST(Cli, OracleCheckTooFewSamplesFailsButExactRecordsPass) {
  const auto dir = scratch("oracle_small");
  const auto out = dir / "oracle.json";
  const auto cfg = dir / "config.json";
  write_text(cfg.string(), R"({"oracle": {"n_kernels": 3, "n_stacks": 2, "relevance_seeds": 1,
    "scaling_replicates": 2, "tv_chains": 1000}})");
  EXPECT_NE(run_cli("oracle-check --config " + cfg.string() + " --samples 10 --out " +
                        out.string(), dir / "log"),
            0);
  const json report = parse_json_file(out.string());
  EXPECT_FALSE(report["pass"].get<bool>());
  for (const auto &r : report["records"]) {
    const std::string op = r["op"];
    if (op == "exact_solve_vs_jacobian_fd" || op == "fim_chain_rule_vs_fim_fd" ||
        op == "coupling_round_trip") {
      EXPECT_TRUE(r["pass"].get<bool>()) << op;
    }
  }
}

}  // namespace
}  // namespace rgaudit
