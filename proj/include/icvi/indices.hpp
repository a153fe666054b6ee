// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "icvi/stats.hpp"

namespace icvi {

/// Cluster identifier as emitted by the clusterer.
using Label = std::int64_t;

enum class IndexKind { CH, I, SIL, NI, RCIP, RH, XB, DB, PS, CONN };

enum class Direction { MaxBetter, MinBetter };

/// Every index kind in canonical column order.
inline constexpr IndexKind kAllIndexKinds[] = {IndexKind::CH,   IndexKind::I,  IndexKind::SIL,
                                               IndexKind::NI,   IndexKind::RCIP, IndexKind::RH,
                                               IndexKind::XB,   IndexKind::DB, IndexKind::PS,
                                               IndexKind::CONN};

Direction direction(IndexKind kind);
std::string_view index_name(IndexKind kind);
std::optional<IndexKind> parse_index_kind(std::string_view name);
bool needs_covariance(IndexKind kind);

/// Result of one observation on the shared cluster state.
struct StepInfo {
  std::size_t cluster = 0;  // dense cluster position, creation order
  bool created = false;
  const Vector* x = nullptr;
};

/// Shared per-stream state: per-cluster running statistics, whole-stream
/// statistics and the squared centroid distance matrix. Updated once per
/// sample, then read by every index.
class ClusterSet {
 public:
  ClusterSet(std::size_t dim, bool track_covariance, double epsilon = kDefaultEpsilon);

  StepInfo observe(const Vector& x, Label label);

  std::size_t dim() const { return dim_; }
  std::size_t k() const { return clusters_.size(); }
  std::size_t sample_count() const { return stream_.n; }
  bool tracks_covariance() const { return track_covariance_; }
  double delta() const { return delta_; }

  const ClusterStats& cluster(std::size_t i) const { return clusters_[i]; }
  const std::vector<ClusterStats>& clusters() const { return clusters_; }
  const StreamStats& stream() const { return stream_; }
  Label label_of(std::size_t i) const { return labels_[i]; }
  std::optional<std::size_t> find(Label label) const;

  /// k x k squared Euclidean centroid distances; row/column J change on a step touching J.
  const Matrix& sq_distances() const { return sq_dist_; }

  /// Replaces the running data covariance with a fixed (e.g. full-dataset) one.
  void set_data_covariance(Matrix sigma);
  /// Fixed data covariance if set, otherwise the running one. Requires covariance tracking.
  const Matrix& data_covariance() const;

 private:
  std::size_t dim_;
  bool track_covariance_;
  double delta_;
  std::vector<ClusterStats> clusters_;
  std::vector<Label> labels_;
  std::unordered_map<Label, std::size_t> positions_;
  StreamStats stream_;
  Matrix sq_dist_;
  std::optional<Matrix> fixed_data_sigma_;
};

/// Snapshot of one index's incremental state.
///
/// `per_cluster` and `pairwise` hold the index-specific cached terms (e.g. SEP_i
/// for CH, the dissimilarity matrix S for SIL, pair terms for rCIP/rH).
struct ValidityState {
  IndexKind kind = IndexKind::CH;
  std::size_t k = 0;
  std::vector<double> per_cluster;
  Matrix pairwise;
  std::optional<double> value;
};

/// Uniform observe-and-score interface shared by all centroid-level indices.
class ValidityIndex {
 public:
  virtual ~ValidityIndex() = default;
  virtual IndexKind kind() const = 0;
  /// Called after the shared ClusterSet has absorbed the sample.
  virtual void update(const ClusterSet& clusters, const StepInfo& step) = 0;
  /// Formula value; nullopt where the formula is undefined.
  virtual std::optional<double> value() const = 0;
  virtual ValidityState state() const = 0;
  virtual std::unique_ptr<ValidityIndex> clone() const = 0;
};

struct IndexParams {
  double i_exponent = 2.0;  // 2 gives PBM
};

/// Creates an incremental index. CONN is not a centroid-level index and is rejected.
std::unique_ptr<ValidityIndex> make_index(IndexKind kind, const IndexParams& params = {});

struct EvaluatorOptions {
  double epsilon = kDefaultEpsilon;
  IndexParams params;
  /// Values are reported only once this many clusters exist.
  std::size_t min_clusters = 2;
};

/// One stream, one shared ClusterSet, any subset of the centroid-level indices.
class Evaluator {
 public:
  Evaluator(std::size_t dim, std::vector<IndexKind> kinds, EvaluatorOptions options = {});
  Evaluator(const Evaluator& other);
  Evaluator& operator=(const Evaluator& other);
  Evaluator(Evaluator&&) noexcept = default;
  Evaluator& operator=(Evaluator&&) noexcept = default;

  StepInfo observe(const Vector& x, Label label);

  /// Gated value: nullopt while k < min_clusters or where the formula is undefined.
  std::optional<double> value(IndexKind kind) const;

  const ClusterSet& clusters() const { return clusters_; }
  ClusterSet& clusters() { return clusters_; }
  const std::vector<IndexKind>& kinds() const { return kinds_; }
  const ValidityIndex& index(IndexKind kind) const;

 private:
  std::vector<IndexKind> kinds_;
  EvaluatorOptions options_;
  ClusterSet clusters_;
  std::vector<std::unique_ptr<ValidityIndex>> indices_;
};

}  // namespace icvi
