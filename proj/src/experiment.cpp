// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "icvi/art.hpp"
#include "icvi/batch.hpp"
#include "icvi/conn.hpp"
#include "icvi/error.hpp"
#include "icvi/harness.hpp"

namespace icvi {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

bool wants_conn(const std::vector<IndexKind>& kinds) {
  return std::find(kinds.begin(), kinds.end(), IndexKind::CONN) != kinds.end();
}

std::vector<IndexKind> centroid_kinds(const std::vector<IndexKind>& kinds) {
  std::vector<IndexKind> out;
  for (IndexKind k : kinds) {
    if (k != IndexKind::CONN) out.push_back(k);
  }
  return out;
}

Matrix full_data_covariance(const Dataset& data, double delta) {
  const auto d = static_cast<Eigen::Index>(data.dim());
  Vector mu = Vector::Zero(d);
  for (const auto& x : data.samples) mu += x;
  mu /= static_cast<double>(data.size());
  Matrix sigma = Matrix::Zero(d, d);
  for (const auto& x : data.samples) sigma += (x - mu) * (x - mu).transpose();
  sigma /= static_cast<double>(data.size() - 1);
  sigma.diagonal().array() += delta;
  return sigma;
}

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
}

}  // namespace

bool ExperimentConfig::uses_smart() const {
  if (model == Model::Smart) return true;
  if (model == Model::FuzzyArt) return false;
  return wants_conn(indices) || !sweep_rho_a.empty();
}

void ExperimentConfig::validate() const {
  if (data_path.empty() == generator.empty()) throw ConfigError("exactly one of data path or generator is required");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
  if (!(rho_a >= 0.0 && rho_a <= 1.0)) throw ConfigError("rho_a must lie in [0, 1]");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(i_exponent >= 1.0)) throw ConfigError("i_exponent must be >= 1");
  if (!cluster_order.empty() && presentation != Presentation::ClusterByCluster) {
    throw ConfigError("cluster_order applies to cluster-by-cluster presentation only");
  }
  if (model == Model::FuzzyArt && wants_conn(indices)) {
    throw ConfigError("conn needs the prototype hierarchy; use model 'smart' or 'auto'");
  }
  std::vector<IndexKind> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ConfigError("duplicate index");
  if (uses_smart() && !(rho_a > rho)) throw ConfigError("rho_a must exceed rho when SMART is active");
  for (double r : sweep_rho_a) {
    if (!(r > rho && r <= 1.0)) throw ConfigError("every swept rho_a must lie in (rho, 1]");
  }
}

ExperimentConfig config_from_json(std::string_view text) {
  ExperimentConfig c;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    if (doc.contains("data")) {
      const json& d = doc.at("data");
      read(d, "path", c.data_path);
      read(d, "labels", c.has_labels);
      read(d, "generator", c.generator);
      read(d, "seed", c.generator_seed);
    }
    read(doc, "rho", c.rho);
    read(doc, "rho_a", c.rho_a);
    read(doc, "alpha", c.alpha);
    read(doc, "beta", c.beta);
    read(doc, "epsilon", c.epsilon);
    read(doc, "i_exponent", c.i_exponent);
    if (doc.contains("model")) c.model = parse_model(doc.at("model").get<std::string>());
    if (doc.contains("presentation")) c.presentation = parse_presentation(doc.at("presentation").get<std::string>());
    read(doc, "cluster_order", c.cluster_order);
    read(doc, "seed", c.seed);
    if (doc.contains("indices")) {
      for (const auto& name : doc.at("indices")) {
        const auto kind = parse_index_kind(name.get<std::string>());
        if (!kind) throw ConfigError("unknown index '" + name.get<std::string>() + "'");
        c.indices.push_back(*kind);
      }
    }
    if (doc.contains("sigma_data")) {
      const auto mode = doc.at("sigma_data").get<std::string>();
      if (mode != "incremental" && mode != "batch") throw ConfigError("sigma_data must be 'incremental' or 'batch'");
      c.batch_data_covariance = mode == "batch";
    }
    read(doc, "sweep_rho_a", c.sweep_rho_a);
    if (doc.contains("outputs")) {
      const json& o = doc.at("outputs");
      read(o, "records", c.records_path);
      read(o, "summary", c.summary_path);
      read(o, "gnuplot", c.gnuplot_path);
      read(o, "conn_matrix", c.conn_matrix_path);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json data = json::object();
  if (!c.data_path.empty()) {
    data["path"] = c.data_path;
    data["labels"] = c.has_labels;
  } else {
    data["generator"] = c.generator;
    data["seed"] = c.generator_seed;
  }
  json names = json::array();
  for (IndexKind k : c.indices) names.push_back(std::string(index_name(k)));
  json doc = {{"data", data},
              {"rho", c.rho},
              {"rho_a", c.rho_a},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"epsilon", c.epsilon},
              {"i_exponent", c.i_exponent},
              {"model", std::string(model_name(c.model))},
              {"presentation", std::string(presentation_name(c.presentation))},
              {"cluster_order", c.cluster_order},
              {"seed", c.seed},
              {"indices", names},
              {"sigma_data", c.batch_data_covariance ? "batch" : "incremental"},
              {"sweep_rho_a", c.sweep_rho_a}};
  json outputs = json::object();
  if (!c.records_path.empty()) outputs["records"] = c.records_path;
  if (!c.summary_path.empty()) outputs["summary"] = c.summary_path;
  if (!c.gnuplot_path.empty()) outputs["gnuplot"] = c.gnuplot_path;
  if (!c.conn_matrix_path.empty()) outputs["conn_matrix"] = c.conn_matrix_path;
  doc["outputs"] = outputs;
  return doc.dump(2);
}

Model parse_model(std::string_view name) {
  if (name == "auto") return Model::Auto;
  if (name == "fuzzy_art") return Model::FuzzyArt;
  if (name == "smart") return Model::Smart;
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

std::string_view model_name(Model m) {
  switch (m) {
    case Model::Auto: return "auto";
    case Model::FuzzyArt: return "fuzzy_art";
    case Model::Smart: return "smart";
  }
  return "auto";
}

Dataset load_dataset(const ExperimentConfig& config) {
  if (!config.data_path.empty()) return ingest(config.data_path, config.has_labels);
  Dataset data = generate(config.generator, config.generator_seed);
  normalize_min_max(data);
  return data;
}

namespace {

// One clusterer behind a uniform step interface.
class Stream {
 public:
  Stream(const ExperimentConfig& config, std::size_t dim, bool smart) {
    if (smart) {
      smart_.emplace(dim, SmartParams{config.rho_a, config.rho, config.alpha, config.beta});
    } else {
      art_.emplace(dim, ArtParams{config.rho, config.alpha, config.beta});
    }
  }

  struct Step {
    std::size_t cluster;
    bool created;
  };

  Step present(const Vector& x) {
    if (smart_) {
      const SmartResult r = smart_->present(x);
      conn_.observe_pair(r.proto, r.second_proto, r.cluster);
      return {r.cluster, r.cluster_created};
    }
    if (static_cast<std::size_t>(x.size()) != art_->dim()) throw DimensionError("sample dimension mismatch");
    const ArtResult r = art_->present(complement_code(x));
    return {r.category, r.created};
  }

  std::size_t k() const { return smart_ ? smart_->cluster_count() : art_->category_count(); }
  std::size_t prototypes() const { return smart_ ? smart_->prototype_count() : 0; }
  const ConnIndex& conn() const { return conn_; }

 private:
  std::optional<FuzzyArt> art_;
  std::optional<FuzzySmart> smart_;
  ConnIndex conn_;
};

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const Dataset& data) {
  config.validate();
  if (data.size() == 0) throw DataError("empty dataset");
  const auto order = presentation_order(data, config.presentation, config.seed, config.cluster_order);

  const bool smart = config.uses_smart();
  Stream stream(config, data.dim(), smart);
  const auto kinds = centroid_kinds(config.indices);
  EvaluatorOptions opts;
  opts.epsilon = config.epsilon;
  opts.params.i_exponent = config.i_exponent;
  Evaluator evaluator(data.dim(), kinds, opts);
  if (config.batch_data_covariance && evaluator.clusters().tracks_covariance()) {
    evaluator.clusters().set_data_covariance(full_data_covariance(data, evaluator.clusters().delta()));
  }

  RunResult result;
  result.indices = config.indices;
  result.predicted.assign(data.size(), 0);
  result.records.reserve(order.size());
  for (std::size_t step = 0; step < order.size(); ++step) {
    const std::size_t id = order[step];
    const Vector& x = data.samples[id];
    const auto s = stream.present(x);
    const Label label = static_cast<Label>(s.cluster) + 1;
    evaluator.observe(x, label);

    StepRecord rec;
    rec.step = step + 1;
    rec.sample_id = id;
    rec.cluster = label;
    rec.k = stream.k();
    rec.cluster_created = s.created;
    for (IndexKind kind : config.indices) {
      rec.values.push_back(kind == IndexKind::CONN ? std::optional<double>(stream.conn().value())
                                                   : evaluator.value(kind));
    }
    result.records.push_back(std::move(rec));
    result.predicted[id] = label;
  }
  result.final_k = stream.k();
  result.prototypes = stream.prototypes();
  if (data.labeled() && data.size() >= 2) result.ari = adjusted_rand_index(data.labels, result.predicted);

  if (!config.conn_matrix_path.empty()) {
    if (!smart) throw ConfigError("conn_matrix output needs SMART");
    std::ostringstream out;
    stream.conn().write_conn_csv(out);
    write_file(config.conn_matrix_path, out.str());
  }
  return result;
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = load_dataset(config);
  RunResult result = run_experiment(config, data);
  if (!config.records_path.empty()) {
    std::ostringstream out;
    write_records_csv(result, out);
    write_file(config.records_path, out.str());
  }
  if (!config.summary_path.empty()) write_file(config.summary_path, summary_json(result, config));
  if (!config.gnuplot_path.empty()) {
    std::ostringstream out;
    write_gnuplot_script(result, config.records_path.empty() ? "records.csv" : config.records_path, out);
    write_file(config.gnuplot_path, out.str());
  }
  return result;
}

void write_records_csv(const RunResult& result, std::ostream& out) {
  out << "step,sample_id,cluster,k";
  for (IndexKind kind : result.indices) out << ',' << index_name(kind);
  out << '\n';
  for (const auto& r : result.records) {
    out << r.step << ',' << r.sample_id << ',' << r.cluster << ',' << r.k;
    for (const auto& v : r.values) {
      out << ',';
      if (v) out << format_double(*v);
    }
    out << '\n';
  }
}

std::string summary_json(const RunResult& result, const ExperimentConfig& config) {
  json finals = json::object();
  for (std::size_t i = 0; i < result.indices.size(); ++i) {
    const auto& v = result.records.empty() ? std::nullopt : result.records.back().values[i];
    finals[std::string(index_name(result.indices[i]))] = v ? json(*v) : json(nullptr);
  }
  json doc = {{"samples", result.records.size()},
              {"final_k", result.final_k},
              {"ari", result.ari ? json(*result.ari) : json(nullptr)},
              {"final_values", finals},
              {"config", json::parse(config_to_json(config))}};
  if (config.uses_smart()) doc["prototypes"] = result.prototypes;
  return doc.dump(2) + "\n";
}

void write_gnuplot_script(const RunResult& result, const std::string& records_path, std::ostream& out) {
  out << "set datafile separator ','\n"
      << "set datafile missing ''\n"
      << "set key autotitle columnhead\n"
      << "set xlabel 'step'\n"
      << "set y2label 'k'\n"
      << "set y2tics\n";
  for (std::size_t i = 0; i < result.indices.size(); ++i) {
    const auto name = index_name(result.indices[i]);
    out << "set terminal pngcairo size 900,500\n"
        << "set output '" << name << ".png'\n"
        << "set ylabel '" << name << "'\n"
        << "plot '" << records_path << "' using 1:" << (5 + i) << " with lines, \\\n"
        << "     '' using 1:4 axes x1y2 with steps lc rgb 'red'\n";
  }
}

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DataError("series differ in length");
  if (a.size() < 3) return std::nullopt;
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    // constant series: perfect agreement only when both coincide exactly
    if (a == b) return 1.0;
    return std::nullopt;
  }
  return sab / std::sqrt(saa * sbb);
}

SweepPoint compare_conn_point(const ExperimentConfig& config, const Dataset& data, double rho_a) {
  const auto order = presentation_order(data, config.presentation, config.seed, config.cluster_order);
  FuzzySmart net(data.dim(), SmartParams{rho_a, config.rho, config.alpha, config.beta});
  ConnIndex conn;
  SweepPoint point;
  point.rho_a = rho_a;

  for (std::size_t step = 0; step < order.size(); ++step) {
    const SmartResult r = net.present(data.samples[order[step]]);
    conn.observe_pair(r.proto, r.second_proto, r.cluster);
    if (r.cluster_created) point.creation_steps.push_back(step);

    // batch shadow: every seen sample re-scored with the frozen network
    CountMatrix cadj;
    for (std::size_t p = 0; p < net.prototype_count(); ++p) cadj.grow();
    std::vector<Count> sizes(net.cluster_count(), 0);
    for (std::size_t s = 0; s <= step; ++s) {
      const SmartResult e = net.evaluate(data.samples[order[s]]);
      sizes[e.cluster] += 1;
      if (e.second_proto) cadj(e.proto, *e.second_proto) += 1;
    }
    const double inc = conn.value();
    const double bat = batch_conn(cadj, net.map_ab(), sizes);
    point.incremental.push_back(inc);
    point.batch.push_back(bat);
    point.error.push_back(bat - inc);
  }
  double sq = 0.0;
  for (double e : point.error) sq += e * e;
  point.mse = point.error.empty() ? 0.0 : sq / static_cast<double>(point.error.size());
  point.pearson = pearson(point.incremental, point.batch);
  return point;
}

std::vector<SweepPoint> compare_conn(const ExperimentConfig& config, const Dataset& data) {
  config.validate();
  if (config.sweep_rho_a.empty()) throw ConfigError("sweep_rho_a is empty");
  std::vector<std::future<SweepPoint>> jobs;
  for (double r : config.sweep_rho_a) {
    jobs.push_back(std::async(std::launch::async, [&config, &data, r] { return compare_conn_point(config, data, r); }));
  }
  std::vector<SweepPoint> points;
  for (auto& j : jobs) points.push_back(j.get());
  return points;
}

std::string sweep_json(const std::vector<SweepPoint>& points) {
  json arr = json::array();
  for (const auto& p : points) {
    arr.push_back({{"rho_a", p.rho_a},
                   {"pearson", p.pearson ? json(*p.pearson) : json(nullptr)},
                   {"mse", p.mse},
                   {"creation_steps", p.creation_steps},
                   {"incremental", p.incremental},
                   {"batch", p.batch}});
  }
  return json{{"sweep", arr}}.dump(2) + "\n";
}

}  // namespace icvi
