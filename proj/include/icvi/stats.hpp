// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Core>

namespace icvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default regularization exponent for covariance matrices.
inline constexpr double kDefaultEpsilon = 12.0;

/// delta = 10^(-epsilon/d), so that |delta * I| = 10^(-epsilon) for any d.
double regularization_delta(double epsilon, std::size_t dim);

/// Running statistics of one hard cluster.
///
/// `cp` is the compactness (sum of squared distances to the centroid) and `g`
/// the sum of deviations from the centroid; together with `n` and `v` they are
/// updated exactly, i.e. they always equal the batch quantities over the
/// samples assigned so far. `sigma` is the delta-regularized sample covariance
/// and only exists when a covariance-consuming index is active.
struct ClusterStats {
  std::size_t n = 0;
  Vector v;
  double cp = 0.0;
  Vector g;
  std::optional<Matrix> sigma;

  std::size_t dim() const { return static_cast<std::size_t>(v.size()); }
};

/// Statistics of the whole stream treated as a single cluster.
struct StreamStats {
  std::size_t n = 0;
  Vector mu;
  double cp0 = 0.0;
  Vector g0;
  std::optional<Matrix> sigma;

  std::size_t dim() const { return static_cast<std::size_t>(mu.size()); }
};

/// Birth of a cluster from its first sample: n=1, v=x, cp=0, g=0.
/// When `delta` is given, sigma is initialized to delta*I.
ClusterStats new_cluster(const Vector& x, std::optional<double> delta = std::nullopt);

/// Adds x to the cluster: n, v, then cp from the *old* g, then g.
/// Leaves sigma untouched; see update_covariance().
ClusterStats assign_sample(ClusterStats stats, const Vector& x);

/// Recursive covariance update. `stats` must be the state *before* x is
/// assigned (old n, old v, old sigma); only sigma is modified.
ClusterStats update_covariance(ClusterStats stats, const Vector& x, double delta);

/// Covariance (when tracked) followed by the compactness update.
ClusterStats absorb(ClusterStats stats, const Vector& x, std::optional<double> delta);

/// Empty stream statistics of dimension `dim`; sigma tracked when `delta` is given.
StreamStats new_stream(std::size_t dim, std::optional<double> delta = std::nullopt);

/// N+1, mean, cp0 and (if tracked) the data covariance.
StreamStats update_stream_stats(StreamStats ss, const Vector& x, std::optional<double> delta = std::nullopt);

}  // namespace icvi
