// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "icvi/conn.hpp"
#include "icvi/indices.hpp"
#include "icvi/stats.hpp"

namespace icvi {

/// Hard partition of a sample set. Labels run contiguously over 1..k and
/// every cluster is non-empty; the constructor enforces both.
class Partition {
 public:
  Partition(std::vector<Vector> samples, std::vector<Label> labels);

  std::size_t size() const { return samples_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(samples_.front().size()); }
  std::size_t k() const { return k_; }
  const std::vector<Vector>& samples() const { return samples_; }
  const std::vector<Label>& labels() const { return labels_; }
  /// Zero-based cluster position of sample i.
  std::size_t cluster_of(std::size_t i) const { return static_cast<std::size_t>(labels_[i] - 1); }

 private:
  std::vector<Vector> samples_;
  std::vector<Label> labels_;
  std::size_t k_ = 0;
};

enum class BatchCvi { CH, DB, XB, I, SIL, CentroidSIL, PS, NI, RCIP, RH };

struct BatchCviParams {
  double db_p = 2.0;  // Minkowski order of the DB separation, >= 1
  double db_q = 2.0;  // power of the DB scatter
  double pbm_p = 2.0;
  /// Squared Euclidean norms throughout (the forms the incremental indices track).
  bool use_squared_norms = true;
  double epsilon = kDefaultEpsilon;
};

/// From-scratch CVI value; nullopt where the formula is undefined.
std::optional<double> batch_cvi(const Partition& partition, BatchCvi kind, const BatchCviParams& params = {});

/// Batch counterpart of an incremental index kind (CONN excluded).
std::optional<double> batch_cvi(const Partition& partition, IndexKind kind, const BatchCviParams& params = {});

/// Conn_Index from a cumulative adjacency matrix, the prototype-to-cluster map
/// and per-cluster sample counts, using the same boundary rules as ConnIndex.
double batch_conn(const CountMatrix& cadj, const std::vector<ClusterId>& proto_cluster,
                  const std::vector<Count>& cluster_sizes);

/// Pair-counting adjusted Rand index. Throws DataError on length mismatch or fewer than 2 items.
double adjusted_rand_index(const std::vector<Label>& a, const std::vector<Label>& b);

}  // namespace icvi
