// SPDX-License-Identifier: Apache-2.0
#include "icvi/stats.hpp"

#include <cmath>
#include <string>

#include "icvi/error.hpp"

namespace icvi {

namespace {

void check_dim(std::size_t expected, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != expected) {
    throw DimensionError("sample has dimension " + std::to_string(x.size()) + ", stream expects " +
                         std::to_string(expected));
  }
}

// Welford-form covariance step on a delta-regularized matrix.
// n_new is the count including x, v_old the mean before x.
Matrix covariance_step(const Matrix& sigma_old, const Vector& x, const Vector& v_old, std::size_t n_new,
                       double delta) {
  const auto dim = x.size();
  const double nn = static_cast<double>(n_new);
  const Vector dev = x - v_old;
  Matrix out = ((nn - 2.0) / (nn - 1.0)) * (sigma_old - delta * Matrix::Identity(dim, dim));
  out += (1.0 / nn) * (dev * dev.transpose());
  out.diagonal().array() += delta;
  return out;
}

// n, v advanced by one sample; cp consumes the old g, g is advanced afterwards.
void compactness_step(std::size_t& n, Vector& v, double& cp, Vector& g, const Vector& x) {
  const double n_old = static_cast<double>(n);
  n += 1;
  const Vector v_old = v;
  v = v_old + (x - v_old) / static_cast<double>(n);
  const Vector z = x - v;
  const Vector dv = v_old - v;
  cp = cp + z.squaredNorm() + n_old * dv.squaredNorm() + 2.0 * dv.dot(g);
  g = g + z + n_old * dv;
}

}  // namespace

double regularization_delta(double epsilon, std::size_t dim) {
  if (dim == 0) throw DimensionError("dimension must be at least 1");
  return std::pow(10.0, -epsilon / static_cast<double>(dim));
}

ClusterStats new_cluster(const Vector& x, std::optional<double> delta) {
  if (x.size() == 0) throw DimensionError("dimension must be at least 1");
  ClusterStats s;
  s.n = 1;
  s.v = x;
  s.cp = 0.0;
  s.g = Vector::Zero(x.size());
  if (delta) s.sigma = *delta * Matrix::Identity(x.size(), x.size());
  return s;
}

ClusterStats assign_sample(ClusterStats stats, const Vector& x) {
  check_dim(stats.dim(), x);
  compactness_step(stats.n, stats.v, stats.cp, stats.g, x);
  return stats;
}

ClusterStats update_covariance(ClusterStats stats, const Vector& x, double delta) {
  check_dim(stats.dim(), x);
  if (!stats.sigma) throw StateError("covariance is not tracked for this cluster");
  stats.sigma = covariance_step(*stats.sigma, x, stats.v, stats.n + 1, delta);
  return stats;
}

ClusterStats absorb(ClusterStats stats, const Vector& x, std::optional<double> delta) {
  if (stats.sigma) {
    if (!delta) throw StateError("covariance update requires a regularization delta");
    stats = update_covariance(std::move(stats), x, *delta);
  }
  return assign_sample(std::move(stats), x);
}

StreamStats new_stream(std::size_t dim, std::optional<double> delta) {
  if (dim == 0) throw DimensionError("dimension must be at least 1");
  StreamStats ss;
  const auto d = static_cast<Eigen::Index>(dim);
  ss.mu = Vector::Zero(d);
  ss.g0 = Vector::Zero(d);
  if (delta) ss.sigma = *delta * Matrix::Identity(d, d);
  return ss;
}

StreamStats update_stream_stats(StreamStats ss, const Vector& x, std::optional<double> delta) {
  check_dim(ss.dim(), x);
  if (ss.n == 0) {
    ss.n = 1;
    ss.mu = x;
    ss.cp0 = 0.0;
    ss.g0.setZero();
    // sigma stays at delta*I for a single sample
    return ss;
  }
  if (ss.sigma) {
    if (!delta) throw StateError("covariance update requires a regularization delta");
    ss.sigma = covariance_step(*ss.sigma, x, ss.mu, ss.n + 1, *delta);
  }
  compactness_step(ss.n, ss.mu, ss.cp0, ss.g0, x);
  return ss;
}

}  // namespace icvi
