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

#ifndef RGAUDIT_IO_HPP
#define RGAUDIT_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fim.hpp"
#include "mcrg.hpp"
#include "operators.hpp"
#include "rbm.hpp"
#include "task.hpp"

namespace rgaudit {

using json = nlohmann::json;

/// Malformed input file; the message names the line and/or field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- primitive conversions -----------------------------------------------------

inline json to_json(const Vector &v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const Matrix &m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json optional_json(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

namespace detail {

inline double number_at(const json &j, const std::string &path) {
  if (!j.is_number()) throw SchemaError(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path + ": non-finite number");
  return v;
}

inline Vector vector_at(const json &j, const std::string &path) {
  if (!j.is_array()) throw SchemaError(path + ": expected an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[i] = number_at(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline Matrix matrix_at(const json &j, const std::string &path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path + ": expected a non-empty 2-D array");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols)
      throw SchemaError(row_path + ": expected a row of " + std::to_string(cols) + " numbers");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = number_at(j[r][c], row_path + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline const json &field(const json &obj, const char *key, const std::string &path) {
  if (!obj.is_object()) throw SchemaError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + ": missing field '" + key + "'");
  return *it;
}

}  // namespace detail

// --- model file ------------------------------------------------------------------

inline json model_to_json(const DeepStack &stack) {
  json layers = json::array();
  for (const auto &l : stack.layers)
    layers.push_back({{"W", to_json(l.weights)},
                      {"a", to_json(l.hidden_bias)},
                      {"b", to_json(l.visible_bias)}});
  json meta = {{"seed", stack.meta.seed},
               {"n_classes", stack.meta.n_classes},
               {"cd_steps", stack.meta.cd_steps},
               {"learning_rate", stack.meta.learning_rate},
               {"epochs", stack.meta.epochs}};
  if (stack.meta.train_accuracy) meta["train_accuracy"] = *stack.meta.train_accuracy;
  return {{"layers", layers}, {"meta", meta}};
}

inline DeepStack model_from_json(const json &j) {
  DeepStack stack;
  const json &layers = detail::field(j, "layers", "model");
  if (!layers.is_array() || layers.empty())
    throw SchemaError("model.layers: expected a non-empty array");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const std::string path = "model.layers[" + std::to_string(k) + "]";
    Matrix w = detail::matrix_at(detail::field(layers[k], "W", path), path + ".W");
    Vector a = detail::vector_at(detail::field(layers[k], "a", path), path + ".a");
    Vector b = layers[k].contains("b") ? detail::vector_at(layers[k]["b"], path + ".b")
                                       : Vector::Zero(w.cols());
    if (a.size() != w.rows())
      throw SchemaError(path + ".a: length " + std::to_string(a.size()) + " but W has " +
                        std::to_string(w.rows()) + " rows");
    if (b.size() != w.cols())
      throw SchemaError(path + ".b: length " + std::to_string(b.size()) + " but W has " +
                        std::to_string(w.cols()) + " columns");
    stack.layers.emplace_back(std::move(w), std::move(a), std::move(b));
  }
  if (j.contains("meta")) {
    const json &meta = j["meta"];
    if (!meta.is_object()) throw SchemaError("model.meta: expected an object");
    if (meta.contains("seed")) {
      if (!meta["seed"].is_number_integer()) throw SchemaError("model.meta.seed: expected an integer");
      stack.meta.seed = meta["seed"].get<std::uint64_t>();
    }
    if (meta.contains("n_classes")) stack.meta.n_classes = meta["n_classes"].get<int>();
    if (meta.contains("cd_steps")) stack.meta.cd_steps = meta["cd_steps"].get<int>();
    if (meta.contains("learning_rate"))
      stack.meta.learning_rate = meta["learning_rate"].get<double>();
    if (meta.contains("epochs")) stack.meta.epochs = meta["epochs"].get<int>();
    if (meta.contains("train_accuracy"))
      stack.meta.train_accuracy = meta["train_accuracy"].get<double>();
  }
  try {
    stack.validate();
  } catch (const ContractError &e) {
    throw SchemaError(std::string("model: ") + e.what());
  }
  return stack;
}

inline std::string read_text(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string &path, const std::string &text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline json parse_json_file(const std::string &path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error &e) {
    throw SchemaError(path + ": " + e.what());
  }
}

inline DeepStack load_model(const std::string &path) { return model_from_json(parse_json_file(path)); }

inline void save_model(const std::string &path, const DeepStack &stack) {
  write_text(path, model_to_json(stack).dump(2) + "\n");
}

// --- datasets -----------------------------------------------------------------------

inline std::string dataset_to_jsonl(const std::vector<LabeledSample> &data) {
  std::string out;
  for (const auto &s : data) {
    json x = json::array();
    for (auto b : s.x) x.push_back(static_cast<int>(b));
    out += json{{"x", x}, {"y", s.y}}.dump() + "\n";
  }
  return out;
}

/// Input points from JSON lines {"x": [...], "y": int?}; x in [0,1].
inline std::vector<InputPoint> inputs_from_jsonl(const std::string &text,
                                                 const std::string &name = "input") {
  std::vector<InputPoint> points;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int dimension = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw SchemaError(where + ": " + e.what());
    }
    Vector x = detail::vector_at(detail::field(j, "x", where), where + ".x");
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] < 0.0 || x[i] > 1.0)
        throw SchemaError(where + ".x[" + std::to_string(i) + "]: outside [0,1]");
    if (dimension >= 0 && x.size() != dimension)
      throw SchemaError(where + ".x: dimension " + std::to_string(x.size()) + ", expected " +
                        std::to_string(dimension));
    dimension = static_cast<int>(x.size());
    std::optional<int> y;
    if (j.contains("y") && !j["y"].is_null()) {
      if (!j["y"].is_number_integer() || j["y"].get<int>() < 0)
        throw SchemaError(where + ".y: expected a non-negative integer");
      y = j["y"].get<int>();
    }
    points.emplace_back(std::move(x), y);
  }
  return points;
}

/// Labeled binary dataset; every x must be a 0/1 vector and y present.
inline std::vector<LabeledSample> dataset_from_jsonl(const std::string &text,
                                                     const std::string &name = "dataset") {
  const auto points = inputs_from_jsonl(text, name);
  std::vector<LabeledSample> data;
  for (std::size_t i = 0; i < points.size(); ++i) {
    LabeledSample s;
    if (!points[i].label)
      throw SchemaError(name + ": record " + std::to_string(i + 1) + " has no label 'y'");
    s.y = *points[i].label;
    for (Eigen::Index k = 0; k < points[i].coordinates.size(); ++k) {
      const double v = points[i].coordinates[k];
      if (v != 0.0 && v != 1.0)
        throw SchemaError(name + ": record " + std::to_string(i + 1) + ".x[" +
                          std::to_string(k) + "] is not binary");
      s.x.push_back(static_cast<std::uint8_t>(v));
    }
    data.push_back(std::move(s));
  }
  return data;
}

inline json task_to_json(const TaskSpec &task) {
  json protos = json::array();
  for (const auto &p : task.prototypes) {
    json row = json::array();
    for (auto b : p) row.push_back(static_cast<int>(b));
    protos.push_back(row);
  }
  return {{"n_in", task.n_in},       {"n_classes", task.n_classes},
          {"prototypes", protos},    {"flip_noise", task.flip_noise},
          {"priors", task.priors},   {"seed", task.seed}};
}

inline TaskSpec task_from_json(const json &j) {
  TaskSpec t;
  try {
    t.n_in = j.at("n_in").get<int>();
    t.n_classes = j.at("n_classes").get<int>();
    t.flip_noise = j.at("flip_noise").get<double>();
    t.priors = j.at("priors").get<std::vector<double>>();
    t.seed = j.value("seed", std::uint64_t{1});
    for (const auto &row : j.at("prototypes")) {
      BitVector p;
      for (const auto &b : row) p.push_back(static_cast<std::uint8_t>(b.get<int>()));
      t.prototypes.push_back(std::move(p));
    }
  } catch (const json::exception &e) {
    throw SchemaError(std::string("task: ") + e.what());
  }
  t.validate();
  return t;
}

inline std::string task_sidecar_path(const std::string &dataset_path) {
  return dataset_path + ".task.json";
}

// --- reports -------------------------------------------------------------------------

inline json to_json(const OperatorBasis &basis) {
  json a = json::array();
  for (const auto &op : basis.operators) a.push_back(op.indices);
  return a;
}

inline json to_json(const EigenMode &mode) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < mode.eigenvector.size(); ++i) {
    re.push_back(mode.eigenvector[i].real());
    im.push_back(mode.eigenvector[i].imag());
  }
  return {{"magnitude", mode.magnitude()},
          {"phase", mode.phase()},
          {"stderr", mode.stderr_magnitude},
          {"relevant", mode.relevant},
          {"eigenvector_real", re},
          {"eigenvector_imag", im}};
}

inline json to_json(const StabilityEstimate &t) {
  json modes = json::array();
  for (const auto &m : t.modes) modes.push_back(to_json(m));
  return {{"from_layer", t.from_layer},
          {"to_layer", t.to_layer},
          {"matrix", to_json(t.matrix)},
          {"entry_stderr", to_json(t.entry_stderr)},
          {"condition_number", std::isfinite(t.condition_number) ? json(t.condition_number)
                                                                 : json(nullptr)},
          {"regularization", t.regularization},
          {"ridge_lambda", t.ridge_lambda},
          {"bootstrap_resamples", t.bootstrap_resamples},
          {"square", t.square()},
          {"has_relevant", t.has_relevant()},
          {"modes", modes}};
}

inline json to_json(const ExpectationSet &e) {
  json j = {{"layer", e.layer_index},
            {"basis", to_json(e.basis)},
            {"exact", e.exact},
            {"sample_count", e.sample_count},
            {"first_moments", to_json(e.first_moments)},
            {"second_moments", to_json(e.second_moments)}};
  if (e.has_cross()) j["cross_moments"] = to_json(e.cross_moments);
  return j;
}

inline json to_json(const FlowReport &r) {
  json layers = json::array();
  for (const auto &e : r.expectations) layers.push_back(to_json(e));
  json transitions = json::array();
  for (const auto &t : r.transitions) transitions.push_back(to_json(t));
  json distances = json::array();
  for (const auto &d : r.distances) distances.push_back(optional_json(d));
  json top = json::array();
  for (const auto &t : r.top_magnitudes) top.push_back(optional_json(t));
  return {{"input_index", r.input_index},
          {"label", r.label ? json(*r.label) : json(nullptr)},
          {"layers", layers},
          {"consecutive_distances", distances},
          {"transitions", transitions},
          {"top_magnitude_by_depth", top}};
}

inline json to_json(const ClassSummary &c) {
  json within = json::object();
  for (const auto &[label, d] : c.within_class_mean) within[std::to_string(label)] = d;
  return {{"within_class_mean_by_class", within},
          {"within_class_mean", optional_json(c.within_mean)},
          {"across_class_mean", optional_json(c.across_mean)}};
}

inline json to_json(const PerturbationRecord &r) {
  return {{"epsilon", r.epsilon},         {"perturbed", to_json(r.perturbed)},
          {"kl", r.kl},                   {"kl_stderr", r.kl_stderr},
          {"class_before", r.class_before}, {"class_after", r.class_after},
          {"flipped", r.flipped},         {"clamped", r.clamped}};
}

inline json to_json(const AdversarialReport &a) {
  json top = json::array(), control = json::array();
  for (const auto &r : a.top) top.push_back(to_json(r));
  for (const auto &r : a.control) control.push_back(to_json(r));
  return {{"input", to_json(a.input)},
          {"fim_spectrum", to_json(a.spectrum)},
          {"decay_ratios", a.decay_ratios},
          {"stiff", a.stiff},
          {"exact", a.exact},
          {"top_direction", to_json(a.top_direction)},
          {"control_direction", to_json(a.control_direction)},
          {"bits_to_flip", a.bits_to_flip},
          {"top", top},
          {"control", control}};
}

inline json to_json(const FimMatrix &f) {
  return {{"matrix", to_json(f.matrix)},
          {"basis_size", f.basis_size},
          {"output_layer", f.output_layer},
          {"transitions_used", f.transitions_used},
          {"exact", f.exact}};
}

/// Shortest round-trip text for a double, as used in the CSV tables.
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace rgaudit

#endif  // RGAUDIT_IO_HPP
