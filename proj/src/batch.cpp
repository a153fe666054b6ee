// SPDX-License-Identifier: Apache-2.0
#include "icvi/batch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include <Eigen/LU>

#include "icvi/error.hpp"

namespace icvi {

Partition::Partition(std::vector<Vector> samples, std::vector<Label> labels)
    : samples_(std::move(samples)), labels_(std::move(labels)) {
  if (samples_.empty()) throw DataError("partition is empty");
  if (samples_.size() != labels_.size()) throw DataError("samples and labels differ in length");
  const auto d = samples_.front().size();
  if (d == 0) throw DimensionError("dimension must be at least 1");
  for (const auto& x : samples_) {
    if (x.size() != d) throw DimensionError("samples differ in dimension");
  }
  std::set<Label> seen(labels_.begin(), labels_.end());
  k_ = seen.size();
  if (*seen.begin() != 1 || *seen.rbegin() != static_cast<Label>(k_)) {
    throw DataError("partition labels must run contiguously over 1..k");
  }
}

namespace {

struct Summary {
  std::vector<std::size_t> n;
  std::vector<Vector> v;
  Vector mu;
};

Summary summarize(const Partition& p) {
  Summary s;
  const auto d = static_cast<Eigen::Index>(p.dim());
  s.n.assign(p.k(), 0);
  s.v.assign(p.k(), Vector::Zero(d));
  s.mu = Vector::Zero(d);
  for (std::size_t i = 0; i < p.size(); ++i) {
    s.n[p.cluster_of(i)] += 1;
    s.v[p.cluster_of(i)] += p.samples()[i];
    s.mu += p.samples()[i];
  }
  for (std::size_t c = 0; c < p.k(); ++c) s.v[c] /= static_cast<double>(s.n[c]);
  s.mu /= static_cast<double>(p.size());
  return s;
}

double norm(const Vector& a, bool squared) { return squared ? a.squaredNorm() : a.norm(); }

std::optional<double> checked(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<double> calinski_harabasz(const Partition& p, const Summary& s) {
  const double k = static_cast<double>(p.k());
  const double n = static_cast<double>(p.size());
  if (p.k() < 2 || p.size() <= p.k()) return std::nullopt;
  double wgss = 0.0;
  double bgss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) wgss += (p.samples()[i] - s.v[p.cluster_of(i)]).squaredNorm();
  for (std::size_t c = 0; c < p.k(); ++c) bgss += static_cast<double>(s.n[c]) * (s.v[c] - s.mu).squaredNorm();
  if (!(wgss > 0.0)) return std::nullopt;
  return checked((bgss / (k - 1.0)) / (wgss / (n - k)));
}

std::optional<double> davies_bouldin(const Partition& p, const Summary& s, const BatchCviParams& prm) {
  if (p.k() < 2) return std::nullopt;
  if (!(prm.db_p >= 1.0)) throw ConfigError("DB Minkowski order p must be >= 1");
  std::vector<double> scatter(p.k(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dist = (p.samples()[i] - s.v[p.cluster_of(i)]).norm();
    scatter[p.cluster_of(i)] += prm.use_squared_norms ? dist * dist : std::pow(dist, prm.db_q);
  }
  for (std::size_t c = 0; c < p.k(); ++c) {
    scatter[c] /= static_cast<double>(s.n[c]);
    if (!prm.use_squared_norms) scatter[c] = std::pow(scatter[c], 1.0 / prm.db_q);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.k(); ++i) {
    double worst = -1.0;
    for (std::size_t j = 0; j < p.k(); ++j) {
      if (i == j) continue;
      double sep;
      if (prm.use_squared_norms) {
        sep = (s.v[i] - s.v[j]).squaredNorm();
      } else {
        sep = std::pow((s.v[i] - s.v[j]).cwiseAbs().array().pow(prm.db_p).sum(), 1.0 / prm.db_p);
      }
      if (!(sep > 0.0)) return std::nullopt;
      worst = std::max(worst, (scatter[i] + scatter[j]) / sep);
    }
    sum += worst;
  }
  return checked(sum / static_cast<double>(p.k()));
}

double min_centroid_sq_distance(const Summary& s) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    for (std::size_t j = i + 1; j < s.v.size(); ++j) best = std::min(best, (s.v[i] - s.v[j]).squaredNorm());
  }
  return best;
}

std::optional<double> xie_beni(const Partition& p, const Summary& s) {
  if (p.k() < 2) return std::nullopt;
  double wgss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) wgss += (p.samples()[i] - s.v[p.cluster_of(i)]).squaredNorm();
  const double sep = min_centroid_sq_distance(s);
  if (!(sep > 0.0)) return std::nullopt;
  return checked(wgss / static_cast<double>(p.size()) / sep);
}

std::optional<double> i_index(const Partition& p, const Summary& s, const BatchCviParams& prm) {
  if (p.k() < 2) return std::nullopt;
  const bool sq = prm.use_squared_norms;
  double e1 = 0.0;
  double ek = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    e1 += norm(p.samples()[i] - s.mu, sq);
    ek += norm(p.samples()[i] - s.v[p.cluster_of(i)], sq);
  }
  double dk = 0.0;
  for (std::size_t i = 0; i < p.k(); ++i) {
    for (std::size_t j = i + 1; j < p.k(); ++j) dk = std::max(dk, norm(s.v[i] - s.v[j], sq));
  }
  if (!(ek > 0.0)) return std::nullopt;
  return checked(std::pow(dk / ek * e1 / static_cast<double>(p.k()), prm.pbm_p));
}

double silhouette_coefficient(double a, double b) {
  const double m = std::max(a, b);
  return m > 0.0 ? (b - a) / m : 0.0;
}

std::optional<double> sample_silhouette(const Partition& p, const Summary& s, const BatchCviParams& prm) {
  if (p.k() < 2) return std::nullopt;
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<double> acc(p.k(), 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j != i) acc[p.cluster_of(j)] += norm(p.samples()[j] - p.samples()[i], prm.use_squared_norms);
    }
    const std::size_t own = p.cluster_of(i);
    // a singleton has zero intra-cluster dissimilarity
    const double a = s.n[own] == 1 ? 0.0 : acc[own] / static_cast<double>(s.n[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < p.k(); ++c) {
      if (c != own) b = std::min(b, acc[c] / static_cast<double>(s.n[c]));
    }
    total += silhouette_coefficient(a, b);
  }
  return checked(total / static_cast<double>(p.size()));
}

// s(i, j) = mean over cluster j of ||x - v_i||^2, straight from the samples.
std::optional<double> centroid_silhouette(const Partition& p, const Summary& s) {
  if (p.k() < 2) return std::nullopt;
  const std::size_t k = p.k();
  Matrix dis = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t l = 0; l < p.size(); ++l) {
    const std::size_t j = p.cluster_of(l);
    for (std::size_t i = 0; i < k; ++i) {
      dis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += (p.samples()[l] - s.v[i]).squaredNorm();
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double b = std::numeric_limits<double>::infinity();
    double a = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double e = dis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / static_cast<double>(s.n[j]);
      if (j == i) {
        a = e;
      } else {
        b = std::min(b, e);
      }
    }
    total += silhouette_coefficient(a, b);
  }
  return checked(total / static_cast<double>(k));
}

std::optional<double> partition_separation(const Partition& p, const Summary& s) {
  if (p.k() < 2) return std::nullopt;
  const double k = static_cast<double>(p.k());
  Vector vbar = Vector::Zero(static_cast<Eigen::Index>(p.dim()));
  for (const auto& v : s.v) vbar += v;
  vbar /= k;
  double beta = 0.0;
  for (const auto& v : s.v) beta += (v - vbar).squaredNorm();
  beta /= k;
  if (!(beta > 0.0)) return std::nullopt;
  const double n_max = static_cast<double>(*std::max_element(s.n.begin(), s.n.end()));
  double total = 0.0;
  for (std::size_t i = 0; i < p.k(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p.k(); ++j) {
      if (j != i) nearest = std::min(nearest, (s.v[i] - s.v[j]).squaredNorm());
    }
    total += static_cast<double>(s.n[i]) / n_max - std::exp(-nearest / beta);
  }
  return checked(total);
}

// Sample covariance (n - 1 normalization) plus delta*I; delta*I alone for n = 1.
std::vector<Matrix> regularized_covariances(const Partition& p, const Summary& s, double delta) {
  const auto d = static_cast<Eigen::Index>(p.dim());
  std::vector<Matrix> scatter(p.k(), Matrix::Zero(d, d));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vector dev = p.samples()[i] - s.v[p.cluster_of(i)];
    scatter[p.cluster_of(i)] += dev * dev.transpose();
  }
  for (std::size_t c = 0; c < p.k(); ++c) {
    if (s.n[c] > 1) scatter[c] /= static_cast<double>(s.n[c] - 1);
    scatter[c].diagonal().array() += delta;
  }
  return scatter;
}

Matrix regularized_data_covariance(const Partition& p, const Summary& s, double delta) {
  const auto d = static_cast<Eigen::Index>(p.dim());
  Matrix sigma = Matrix::Zero(d, d);
  for (const auto& x : p.samples()) sigma += (x - s.mu) * (x - s.mu).transpose();
  if (p.size() > 1) sigma /= static_cast<double>(p.size() - 1);
  sigma.diagonal().array() += delta;
  return sigma;
}

double log_det(const Matrix& m) {
  // determinant through a pivoted LU, independent of the Cholesky path used incrementally
  const double det = m.fullPivLu().determinant();
  return det > 0.0 ? std::log(det) : std::numeric_limits<double>::quiet_NaN();
}

std::optional<double> negentropy_increment(const Partition& p, const Summary& s, double delta) {
  const auto cov = regularized_covariances(p, s, delta);
  const double n = static_cast<double>(p.size());
  double total = 0.0;
  for (std::size_t c = 0; c < p.k(); ++c) {
    const double pc = static_cast<double>(s.n[c]) / n;
    total += 0.5 * pc * log_det(cov[c]) - pc * std::log(pc);
  }
  total -= 0.5 * log_det(regularized_data_covariance(p, s, delta));
  return checked(total);
}

// log of the Gaussian kernel G(diff, S) via an explicit inverse.
double log_gaussian_kernel(const Vector& diff, const Matrix& s) {
  const double d = static_cast<double>(diff.size());
  const double quad = diff.dot(s.inverse() * diff);
  return -0.5 * quad - 0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det(s));
}

std::optional<double> cross_information(const Partition& p, const Summary& s, double delta, bool entropy) {
  const auto cov = regularized_covariances(p, s, delta);
  double total = 0.0;
  for (std::size_t i = 0; i < p.k(); ++i) {
    for (std::size_t j = i + 1; j < p.k(); ++j) {
      const double lg = log_gaussian_kernel(s.v[i] - s.v[j], cov[i] + cov[j]);
      total += entropy ? -lg : std::exp(lg);
    }
  }
  return checked(total);
}

}  // namespace

std::optional<double> batch_cvi(const Partition& p, BatchCvi kind, const BatchCviParams& prm) {
  const Summary s = summarize(p);
  const double delta = regularization_delta(prm.epsilon, p.dim());
  switch (kind) {
    case BatchCvi::CH: return calinski_harabasz(p, s);
    case BatchCvi::DB: return davies_bouldin(p, s, prm);
    case BatchCvi::XB: return xie_beni(p, s);
    case BatchCvi::I: return i_index(p, s, prm);
    case BatchCvi::SIL: return sample_silhouette(p, s, prm);
    case BatchCvi::CentroidSIL: return centroid_silhouette(p, s);
    case BatchCvi::PS: return partition_separation(p, s);
    case BatchCvi::NI: return negentropy_increment(p, s, delta);
    case BatchCvi::RCIP: return cross_information(p, s, delta, false);
    case BatchCvi::RH: return cross_information(p, s, delta, true);
  }
  return std::nullopt;
}

std::optional<double> batch_cvi(const Partition& p, IndexKind kind, const BatchCviParams& prm) {
  BatchCviParams sq = prm;
  sq.use_squared_norms = true;
  switch (kind) {
    case IndexKind::CH: return batch_cvi(p, BatchCvi::CH, sq);
    case IndexKind::I: return batch_cvi(p, BatchCvi::I, sq);
    case IndexKind::SIL: return batch_cvi(p, BatchCvi::CentroidSIL, sq);
    case IndexKind::NI: return batch_cvi(p, BatchCvi::NI, sq);
    case IndexKind::RCIP: return batch_cvi(p, BatchCvi::RCIP, sq);
    case IndexKind::RH: return batch_cvi(p, BatchCvi::RH, sq);
    case IndexKind::XB: return batch_cvi(p, BatchCvi::XB, sq);
    case IndexKind::DB: return batch_cvi(p, BatchCvi::DB, sq);
    case IndexKind::PS: return batch_cvi(p, BatchCvi::PS, sq);
    case IndexKind::CONN: break;
  }
  throw ConfigError("conn has no partition-level batch form; use batch_conn");
}

double batch_conn(const CountMatrix& cadj, const std::vector<ClusterId>& proto_cluster,
                  const std::vector<Count>& cluster_sizes) {
  const std::size_t P = cadj.size();
  const std::size_t k = cluster_sizes.size();
  if (proto_cluster.size() != P) throw DataError("prototype map does not match CADJ size");
  if (k == 0) return 0.0;

  std::vector<std::size_t> members(k, 0);
  for (ClusterId c : proto_cluster) {
    if (c >= k) throw DataError("prototype mapped to unknown cluster");
    members[c] += 1;
  }
  auto conn = [&](std::size_t i, std::size_t j) { return static_cast<double>(cadj(i, j) + cadj(j, i)); };

  double intra = 0.0;
  for (ClusterId l = 0; l < k; ++l) {
    if (members[l] <= 1) {
      intra += 1.0;
      continue;
    }
    double within = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
      for (std::size_t j = 0; j < P; ++j) {
        if (proto_cluster[i] == l && proto_cluster[j] == l) within += static_cast<double>(cadj(i, j));
      }
    }
    intra += cluster_sizes[l] > 0 ? within / static_cast<double>(cluster_sizes[l]) : 0.0;
  }
  intra /= static_cast<double>(k);

  double inter = 1.0;
  if (k > 1) {
    inter = 0.0;
    for (ClusterId l = 0; l < k; ++l) {
      double worst = 0.0;
      for (ClusterId m = 0; m < k; ++m) {
        if (m == l) continue;
        // V(l, m): prototypes of l with any CONN link into m
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
          if (proto_cluster[i] != l) continue;
          bool linked = false;
          for (std::size_t j = 0; j < P; ++j) {
            if (proto_cluster[j] == m && conn(i, j) > 0.0) linked = true;
          }
          if (!linked) continue;
          for (std::size_t j = 0; j < P; ++j) {
            den += conn(i, j);
            if (proto_cluster[j] == m) num += conn(i, j);
          }
        }
        if (den > 0.0) worst = std::max(worst, num / den);
      }
      inter += worst;
    }
    inter /= static_cast<double>(k);
  }
  return intra * (1.0 - inter);
}

double adjusted_rand_index(const std::vector<Label>& a, const std::vector<Label>& b) {
  if (a.size() != b.size()) throw DataError("labelings differ in length");
  if (a.size() < 2) throw DataError("ARI needs at least two items");
  std::map<std::pair<Label, Label>, double> table;
  std::map<Label, double> rows;
  std::map<Label, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto pairs = [](double n) { return n * (n - 1.0) / 2.0; };
  double index = 0.0;
  for (const auto& [key, n] : table) index += pairs(n);
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (const auto& [key, n] : rows) sum_a += pairs(n);
  for (const auto& [key, n] : cols) sum_b += pairs(n);
  const double expected = sum_a * sum_b / pairs(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both trivial partitions, hence identical
  return (index - expected) / (max_index - expected);
}

}  // namespace icvi
