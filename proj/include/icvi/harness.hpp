// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icvi/indices.hpp"
#include "icvi/stats.hpp"

namespace icvi {

struct Dataset {
  std::vector<Vector> samples;
  std::vector<Label> labels;  // empty when the source has no label column

  std::size_t size() const { return samples.size(); }
  std::size_t dim() const { return samples.empty() ? 0 : static_cast<std::size_t>(samples.front().size()); }
  bool labeled() const { return !labels.empty(); }
};

/// Parses CSV text: d numeric columns plus, when `has_labels`, a trailing
/// integer label column. A first line that does not parse as numbers is
/// treated as a header. Errors carry 1-based line and column numbers.
Dataset parse_csv(std::istream& in, bool has_labels);

/// Per-feature min-max scaling to [0, 1]. Rejects fewer than two rows and
/// constant features.
void normalize_min_max(Dataset& data);

/// parse_csv on a file followed by normalize_min_max.
Dataset ingest(const std::filesystem::path& path, bool has_labels);

void write_csv(const Dataset& data, std::ostream& out);

/// Four bivariate Gaussian blobs, 500 samples each, labels 1..4 (raw units).
Dataset generate_d4(std::uint64_t seed);

/// Geometry of the fifteen-blob ring dataset (raw units).
struct RingLayout {
  double outer_radius = 7.4;
  double inner_radius = 3.0;
  double spread = 0.24;  // per-axis standard deviation
  std::size_t per_cluster = 40;
};

/// Fifteen isotropic Gaussian blobs: seven on an outer ring (labels 1..7), a
/// central blob (8) and seven on a tight inner ring (9..15).
Dataset generate_r15(std::uint64_t seed, const RingLayout& layout = {});

/// Named generator ("d4" or "r15"); throws ConfigError for unknown names.
Dataset generate(std::string_view name, std::uint64_t seed);

enum class Presentation { ClusterByCluster, AsIs, Shuffled };

Presentation parse_presentation(std::string_view name);
std::string_view presentation_name(Presentation p);

/// Sample order for a stream. Cluster-by-cluster uses ascending labels unless
/// `cluster_order` lists every label; samples inside a cluster are shuffled
/// with `seed`.
std::vector<std::size_t> presentation_order(const Dataset& data, Presentation mode, std::uint64_t seed,
                                            const std::vector<Label>& cluster_order = {});

/// Clusterer selection. Auto picks SMART when conn is requested or swept.
enum class Model { Auto, FuzzyArt, Smart };

Model parse_model(std::string_view name);
std::string_view model_name(Model m);

struct ExperimentConfig {
  // data source: a CSV path or a generator name
  std::string data_path;
  bool has_labels = true;
  std::string generator;
  std::uint64_t generator_seed = 0;

  double rho = 0.75;    // clustering (B-side) vigilance
  double rho_a = 0.9;   // prototype (A-side) vigilance, SMART only
  double alpha = 1e-3;
  double beta = 1.0;
  double epsilon = kDefaultEpsilon;
  double i_exponent = 2.0;

  Model model = Model::Auto;
  Presentation presentation = Presentation::ClusterByCluster;
  std::vector<Label> cluster_order;
  std::uint64_t seed = 0;

  std::vector<IndexKind> indices;
  /// Data covariance for NI: running ("incremental") or full-file ("batch").
  bool batch_data_covariance = false;

  std::vector<double> sweep_rho_a;  // compare_conn grid

  std::string records_path;
  std::string summary_path;
  std::string gnuplot_path;
  std::string conn_matrix_path;

  bool uses_smart() const;
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

ExperimentConfig config_from_json(std::string_view text);
std::string config_to_json(const ExperimentConfig& config);

/// Loads the configured source and normalizes it.
Dataset load_dataset(const ExperimentConfig& config);

struct StepRecord {
  std::size_t step = 0;
  std::size_t sample_id = 0;
  Label cluster = 0;  // 1-based, creation order
  std::size_t k = 0;
  std::vector<std::optional<double>> values;  // one per configured index
  bool cluster_created = false;
};

struct RunResult {
  std::vector<IndexKind> indices;
  std::vector<StepRecord> records;
  std::vector<Label> predicted;  // per dataset row, 1-based; 0 if never presented
  std::size_t final_k = 0;
  std::size_t prototypes = 0;  // SMART only
  std::optional<double> ari;
};

/// Streams the dataset once through the clusterer and every active index.
RunResult run_experiment(const ExperimentConfig& config, const Dataset& data);

/// Loads data, runs, and writes every configured output file.
RunResult run_experiment(const ExperimentConfig& config);

/// Header plus one row per step; undefined values are empty cells.
void write_records_csv(const RunResult& result, std::ostream& out);
std::string summary_json(const RunResult& result, const ExperimentConfig& config);
void write_gnuplot_script(const RunResult& result, const std::string& records_path, std::ostream& out);

struct SweepPoint {
  double rho_a = 0.0;
  std::vector<double> incremental;
  std::vector<double> batch;
  std::vector<double> error;  // batch - incremental
  std::vector<std::size_t> creation_steps;  // 0-based steps where a cluster appeared
  std::optional<double> pearson;
  double mse = 0.0;
};

/// Pearson correlation; nullopt with fewer than 3 points or zero variance.
std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b);

/// Incremental Conn_Index against a batch shadow that recomputes every
/// seen sample's winners in evaluation mode after each presentation.
SweepPoint compare_conn_point(const ExperimentConfig& config, const Dataset& data, double rho_a);
std::vector<SweepPoint> compare_conn(const ExperimentConfig& config, const Dataset& data);

std::string sweep_json(const std::vector<SweepPoint>& points);

}  // namespace icvi
