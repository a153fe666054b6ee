// SPDX-License-Identifier: Apache-2.0
#include "icvi/indices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "icvi/error.hpp"

namespace icvi {

// ---------------------------------------------------------------------------
// Index metadata

Direction direction(IndexKind kind) {
  switch (kind) {
    case IndexKind::CH:
    case IndexKind::I:
    case IndexKind::SIL:
    case IndexKind::PS:
    case IndexKind::RH:
    case IndexKind::CONN:
      return Direction::MaxBetter;
    case IndexKind::DB:
    case IndexKind::XB:
    case IndexKind::NI:
    case IndexKind::RCIP:
      return Direction::MinBetter;
  }
  return Direction::MaxBetter;
}

std::string_view index_name(IndexKind kind) {
  switch (kind) {
    case IndexKind::CH: return "ch";
    case IndexKind::I: return "i";
    case IndexKind::SIL: return "sil";
    case IndexKind::NI: return "ni";
    case IndexKind::RCIP: return "rcip";
    case IndexKind::RH: return "rh";
    case IndexKind::XB: return "xb";
    case IndexKind::DB: return "db";
    case IndexKind::PS: return "ps";
    case IndexKind::CONN: return "conn";
  }
  return "?";
}

std::optional<IndexKind> parse_index_kind(std::string_view name) {
  for (IndexKind k : kAllIndexKinds) {
    if (index_name(k) == name) return k;
  }
  if (name == "pbm") return IndexKind::I;
  return std::nullopt;
}

bool needs_covariance(IndexKind kind) {
  return kind == IndexKind::NI || kind == IndexKind::RCIP || kind == IndexKind::RH;
}

// ---------------------------------------------------------------------------
// ClusterSet

ClusterSet::ClusterSet(std::size_t dim, bool track_covariance, double epsilon)
    : dim_(dim),
      track_covariance_(track_covariance),
      delta_(regularization_delta(epsilon, dim)),
      stream_(new_stream(dim, track_covariance ? std::optional<double>(delta_) : std::nullopt)),
      sq_dist_(0, 0) {}

std::optional<std::size_t> ClusterSet::find(Label label) const {
  auto it = positions_.find(label);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

StepInfo ClusterSet::observe(const Vector& x, Label label) {
  if (static_cast<std::size_t>(x.size()) != dim_) {
    throw DimensionError("sample has dimension " + std::to_string(x.size()) + ", stream expects " +
                         std::to_string(dim_));
  }
  const std::optional<double> delta = track_covariance_ ? std::optional<double>(delta_) : std::nullopt;
  stream_ = update_stream_stats(std::move(stream_), x, delta);

  StepInfo step;
  step.x = &x;
  if (auto pos = find(label)) {
    step.cluster = *pos;
    clusters_[*pos] = absorb(std::move(clusters_[*pos]), x, delta);
  } else {
    step.cluster = clusters_.size();
    step.created = true;
    clusters_.push_back(new_cluster(x, delta));
    labels_.push_back(label);
    positions_.emplace(label, step.cluster);
    const auto k = static_cast<Eigen::Index>(clusters_.size());
    sq_dist_.conservativeResize(k, k);
  }

  const auto J = static_cast<Eigen::Index>(step.cluster);
  const Vector& vj = clusters_[step.cluster].v;
  for (Eigen::Index i = 0; i < sq_dist_.rows(); ++i) {
    const double d2 = i == J ? 0.0 : (clusters_[static_cast<std::size_t>(i)].v - vj).squaredNorm();
    sq_dist_(i, J) = d2;
    sq_dist_(J, i) = d2;
  }
  return step;
}

void ClusterSet::set_data_covariance(Matrix sigma) {
  if (static_cast<std::size_t>(sigma.rows()) != dim_ || static_cast<std::size_t>(sigma.cols()) != dim_) {
    throw DimensionError("data covariance must be " + std::to_string(dim_) + "x" + std::to_string(dim_));
  }
  fixed_data_sigma_ = std::move(sigma);
}

const Matrix& ClusterSet::data_covariance() const {
  if (fixed_data_sigma_) return *fixed_data_sigma_;
  if (!stream_.sigma) throw StateError("data covariance is not tracked");
  return *stream_.sigma;
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

std::optional<double> finite_or_null(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

struct PairPick {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
};

// Extremes over i<j; ties keep the lexicographically lowest pair.
template <typename Better>
std::optional<PairPick> pick_pair(const Matrix& m, Better better) {
  std::optional<PairPick> best;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!best || better(v, best->value)) {
        best = PairPick{static_cast<std::size_t>(i), static_cast<std::size_t>(j), v};
      }
    }
  }
  return best;
}

std::optional<PairPick> min_pair(const Matrix& m) {
  return pick_pair(m, [](double a, double b) { return a < b; });
}

std::optional<PairPick> max_pair(const Matrix& m) {
  return pick_pair(m, [](double a, double b) { return a > b; });
}

double total_compactness(const ClusterSet& cs) {
  double sum = 0.0;
  for (const auto& c : cs.clusters()) sum += c.cp;
  return sum;
}

std::vector<double> compactness_vector(const ClusterSet& cs) {
  std::vector<double> out;
  out.reserve(cs.k());
  for (const auto& c : cs.clusters()) out.push_back(c.cp);
  return out;
}

// log|S| via Cholesky; NaN when S is not positive definite.
double log_determinant(const Matrix& s) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  const auto& l = llt.matrixL();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

const Matrix& covariance_of(const ClusterStats& c) {
  if (!c.sigma) throw StateError("index requires covariance tracking");
  return *c.sigma;
}

// ---------------------------------------------------------------------------
// iCH

class CalinskiHarabasz final : public ValidityIndex {
 public:
  IndexKind kind() const override { return IndexKind::CH; }

  void update(const ClusterSet& cs, const StepInfo&) override {
    // the data mean moves on every sample, so every SEP_i is refreshed
    const Vector& mu = cs.stream().mu;
    sep_.resize(cs.k());
    for (std::size_t i = 0; i < cs.k(); ++i) {
      const auto& c = cs.cluster(i);
      sep_[i] = static_cast<double>(c.n) * (c.v - mu).squaredNorm();
    }
    k_ = cs.k();
    const double n = static_cast<double>(cs.sample_count());
    const double kk = static_cast<double>(k_);
    const double cp = total_compactness(cs);
    value_.reset();
    if (k_ >= 2 && cs.sample_count() > k_ && cp > 0.0) {
      double sep = 0.0;
      for (double s : sep_) sep += s;
      value_ = finite_or_null(sep / cp * (n - kk) / (kk - 1.0));
    }
  }

  std::optional<double> value() const override { return value_; }
  ValidityState state() const override { return {kind(), k_, sep_, Matrix(), value_}; }
  std::unique_ptr<ValidityIndex> clone() const override { return std::make_unique<CalinskiHarabasz>(*this); }

 private:
  std::size_t k_ = 0;
  std::vector<double> sep_;
  std::optional<double> value_;
};

// ---------------------------------------------------------------------------
// iI / iPBM

class IIndex final : public ValidityIndex {
 public:
  explicit IIndex(double exponent) : exponent_(exponent) {
    if (!(exponent >= 1.0)) throw ConfigError("I index exponent must be >= 1");
  }
  IndexKind kind() const override { return IndexKind::I; }

  void update(const ClusterSet& cs, const StepInfo&) override {
    k_ = cs.k();
    value_.reset();
    const double cp = total_compactness(cs);
    const auto far = max_pair(cs.sq_distances());
    if (far && cp > 0.0) {
      const double base = far->value / cp * cs.stream().cp0 / static_cast<double>(k_);
      value_ = finite_or_null(std::pow(base, exponent_));
    }
    cp_ = compactness_vector(cs);
  }

  std::optional<double> value() const override { return value_; }
  ValidityState state() const override { return {kind(), k_, cp_, Matrix(), value_}; }
  std::unique_ptr<ValidityIndex> clone() const override { return std::make_unique<IIndex>(*this); }

 private:
  double exponent_;
  std::size_t k_ = 0;
  std::vector<double> cp_;
  std::optional<double> value_;
};

// ---------------------------------------------------------------------------
// iXB

class XieBeni final : public ValidityIndex {
 public:
  IndexKind kind() const override { return IndexKind::XB; }

  void update(const ClusterSet& cs, const StepInfo&) override {
    k_ = cs.k();
    value_.reset();
    cp_ = compactness_vector(cs);
    const auto near = min_pair(cs.sq_distances());
    if (near && near->value > 0.0) {
      value_ = finite_or_null(total_compactness(cs) / static_cast<double>(cs.sample_count()) / near->value);
    }
  }

  std::optional<double> value() const override { return value_; }
  ValidityState state() const override { return {kind(), k_, cp_, Matrix(), value_}; }
  std::unique_ptr<ValidityIndex> clone() const override { return std::make_unique<XieBeni>(*this); }

 private:
  std::size_t k_ = 0;
  std::vector<double> cp_;
  std::optional<double> value_;
};

// ---------------------------------------------------------------------------
// iDB

class DaviesBouldin final : public ValidityIndex {
 public:
  IndexKind kind() const override { return IndexKind::DB; }

  void update(const ClusterSet& cs, const StepInfo& step) override {
    k_ = cs.k();
    if (step.created) scatter_.push_back(0.0);
    const auto& c = cs.cluster(step.cluster);
    scatter_[step.cluster] = c.cp / static_cast<double>(c.n);

    value_.reset();
    if (k_ < 2) return;
    const Matrix& d2 = cs.sq_distances();
    double sum = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
      double worst = -1.0;
      for (std::size_t j = 0; j < k_; ++j) {
        if (j == i) continue;
        const double sep = d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (!(sep > 0.0)) return;  // coincident centroids
        worst = std::max(worst, (scatter_[i] + scatter_[j]) / sep);
      }
      sum += worst;
    }
    value_ = finite_or_null(sum / static_cast<double>(k_));
  }

  std::optional<double> value() const override { return value_; }
  ValidityState state() const override { return {kind(), k_, scatter_, Matrix(), value_}; }
  std::unique_ptr<ValidityIndex> clone() const override { return std::make_unique<DaviesBouldin>(*this); }

 private:
  std::size_t k_ = 0;
  std::vector<double> scatter_;  // CP_i / n_i
  std::optional<double> value_;
};

// ---------------------------------------------------------------------------
// PS (hard version; needs only centroids and counts)

class PartitionSeparation final : public ValidityIndex {
 public:
  IndexKind kind() const override { return IndexKind::PS; }

  void update(const ClusterSet& cs, const StepInfo&) override {
    k_ = cs.k();
    counts_.assign(k_, 0.0);
    value_.reset();
    double n_max = 0.0;
    Vector mean = Vector::Zero(static_cast<Eigen::Index>(cs.dim()));
    for (std::size_t i = 0; i < k_; ++i) {
      counts_[i] = static_cast<double>(cs.cluster(i).n);
      n_max = std::max(n_max, counts_[i]);
      mean += cs.cluster(i).v;
    }
    if (k_ < 2) return;
    mean /= static_cast<double>(k_);
    double beta = 0.0;
    for (const auto& c : cs.clusters()) beta += (c.v - mean).squaredNorm();
    beta /= static_cast<double>(k_);
    if (!(beta > 0.0)) return;

    const Matrix& d2 = cs.sq_distances();
    double sum = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k_; ++j) {
        if (j != i) nearest = std::min(nearest, d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
      sum += counts_[i] / n_max - std::exp(-nearest / beta);
    }
    value_ = finite_or_null(sum);
  }

  std::optional<double> value() const override { return value_; }
  ValidityState state() const override { return {kind(), k_, counts_, Matrix(), value_}; }
  std::unique_ptr<ValidityIndex> clone() const override { return std::make_unique<PartitionSeparation>(*this); }

 private:
  std::size_t k_ = 0;
  std::vector<double> counts_;
  std::optional<double> value_;
};

// ---------------------------------------------------------------------------
// iSIL: centroid silhouette over the dissimilarity matrix S,
// s(i,j) = (1/n_j) * sum_{x in cluster j} ||x - v_i||^2.
// Per cluster it keeps sum ||x||^2 and sum x (compactness about the origin).

class Silhouette final : public ValidityIndex {
 public:
  IndexKind kind() const override { return IndexKind::SIL; }

  void update(const ClusterSet& cs, const StepInfo& step) override {
    const Vector& x = *step.x;
    const std::size_t J = step.cluster;
    const auto Jx = static_cast<Eigen::Index>(J);
    const double x2 = x.squaredNorm();

    if (step.created) {
      const auto k = static_cast<Eigen::Index>(cs.k());
      s_.conservativeResize(k, k);
      for (std::size_t i = 0; i < J; ++i) {
        const Vector& vi = cs.cluster(i).v;
        // new cluster holds only x: CP = ||x||^2, g = x, n = 1
        s_(static_cast<Eigen::Index>(i), Jx) = clamp(x2 + vi.squaredNorm() - 2.0 * vi.dot(x));
        const double nj = static_cast<double>(cs.cluster(i).n);
        s_(Jx, static_cast<Eigen::Index>(i)) = clamp((cp_[i] + nj * x2 - 2.0 * x.dot(g_[i])) / nj);
      }
      s_(Jx, Jx) = 0.0;
      cp_.push_back(x2);
      g_.push_back(x);
    } else {
      const auto& cj = cs.cluster(J);
      const double n_new = static_cast<double>(cj.n);
      const double n_old = n_new - 1.0;
      const Vector& vj = cj.v;
      for (std::size_t i = 0; i < cs.k(); ++i) {
        const auto ix = static_cast<Eigen::Index>(i);
        if (i == J) {
          const Vector z = x - vj;
          s_(Jx, Jx) = clamp((cp_[J] + z.squaredNorm() + n_old * vj.squaredNorm() - 2.0 * vj.dot(g_[J])) / n_new);
          continue;
        }
        const Vector& vi = cs.cluster(i).v;
        const Vector z = x - vi;
        s_(ix, Jx) = clamp((cp_[J] + z.squaredNorm() + n_old * vi.squaredNorm() - 2.0 * vi.dot(g_[J])) / n_new);
        const double nj = static_cast<double>(cs.cluster(i).n);
        s_(Jx, ix) = clamp((cp_[i] + nj * vj.squaredNorm() - 2.0 * vj.dot(g_[i])) / nj);
      }
      // after every case formula has consumed the old values
      cp_[J] += x2;
      g_[J] += x;
    }

    k_ = cs.k();
    coefficients_.assign(k_, 0.0);
    value_.reset();
    if (k_ < 2) return;
    double sum = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
      const auto ix = static_cast<Eigen::Index>(i);
      const double a = s_(ix, ix);
      double b = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < k_; ++l) {
        if (l != i) b = std::min(b, s_(ix, static_cast<Eigen::Index>(l)));
      }
      const double m = std::max(a, b);
      coefficients_[i] = m > 0.0 ? (b - a) / m : 0.0;
      sum += coefficients_[i];
    }
    value_ = finite_or_null(sum / static_cast<double>(k_));
  }

  std::optional<double> value() const override { return value_; }
  ValidityState state() const override { return {kind(), k_, coefficients_, s_, value_}; }
  std::unique_ptr<ValidityIndex> clone() const override { return std::make_unique<Silhouette>(*this); }

 private:
  static double clamp(double v) { return v < 0.0 ? 0.0 : v; }

  std::size_t k_ = 0;
  Matrix s_{0, 0};
  std::vector<double> cp_;
  std::vector<Vector> g_;
  std::vector<double> coefficients_;
  std::optional<double> value_;
};

// ---------------------------------------------------------------------------
// iNI

class NegentropyIncrement final : public ValidityIndex {
 public:
  IndexKind kind() const override { return IndexKind::NI; }

  void update(const ClusterSet& cs, const StepInfo& step) override {
    if (step.created) log_det_.push_back(0.0);
    log_det_[step.cluster] = log_determinant(covariance_of(cs.cluster(step.cluster)));
    k_ = cs.k();

    const double n = static_cast<double>(cs.sample_count());
    double sum = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
      const double p = static_cast<double>(cs.cluster(i).n) / n;
      sum += p * (0.5 * log_det_[i] - std::log(p));
    }
    value_ = finite_or_null(sum - 0.5 * log_determinant(cs.data_covariance()));
  }

  std::optional<double> value() const override { return value_; }
  ValidityState state() const override { return {kind(), k_, log_det_, Matrix(), value_}; }
  std::unique_ptr<ValidityIndex> clone() const override { return std::make_unique<NegentropyIncrement>(*this); }

 private:
  std::size_t k_ = 0;
  std::vector<double> log_det_;
  std::optional<double> value_;
};

// ---------------------------------------------------------------------------
// irCIP / irH. One prototype per cluster; pair terms are kept as
// log G(v_i - v_j, S_i + S_j) and only row/column J is refreshed.

class CrossInformation final : public ValidityIndex {
 public:
  explicit CrossInformation(IndexKind kind) : kind_(kind) {}
  IndexKind kind() const override { return kind_; }

  void update(const ClusterSet& cs, const StepInfo& step) override {
    const auto k = static_cast<Eigen::Index>(cs.k());
    if (step.created) log_g_.conservativeResize(k, k);
    const auto J = static_cast<Eigen::Index>(step.cluster);
    const auto& cj = cs.cluster(step.cluster);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (i == J) {
        log_g_(J, J) = 0.0;
        continue;
      }
      const auto& ci = cs.cluster(static_cast<std::size_t>(i));
      const double t = log_gaussian(ci.v - cj.v, covariance_of(ci) + covariance_of(cj));
      log_g_(i, J) = t;
      log_g_(J, i) = t;
    }
    k_ = cs.k();

    double sum = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i + 1; j < k; ++j) {
        sum += kind_ == IndexKind::RCIP ? std::exp(log_g_(i, j)) : -log_g_(i, j);
      }
    }
    value_ = finite_or_null(sum);
  }

  std::optional<double> value() const override { return value_; }
  ValidityState state() const override { return {kind_, k_, {}, log_g_, value_}; }
  std::unique_ptr<ValidityIndex> clone() const override { return std::make_unique<CrossInformation>(*this); }

 private:
  static double log_gaussian(const Vector& diff, const Matrix& s) {
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
    const Vector w = llt.matrixL().solve(diff);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) log_det += std::log(llt.matrixL()(i, i));
    log_det *= 2.0;
    const double d = static_cast<double>(diff.size());
    return -0.5 * w.squaredNorm() - 0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det);
  }

  IndexKind kind_;
  std::size_t k_ = 0;
  Matrix log_g_{0, 0};
  std::optional<double> value_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Factory and evaluator

std::unique_ptr<ValidityIndex> make_index(IndexKind kind, const IndexParams& params) {
  switch (kind) {
    case IndexKind::CH: return std::make_unique<CalinskiHarabasz>();
    case IndexKind::I: return std::make_unique<IIndex>(params.i_exponent);
    case IndexKind::SIL: return std::make_unique<Silhouette>();
    case IndexKind::NI: return std::make_unique<NegentropyIncrement>();
    case IndexKind::RCIP:
    case IndexKind::RH: return std::make_unique<CrossInformation>(kind);
    case IndexKind::XB: return std::make_unique<XieBeni>();
    case IndexKind::DB: return std::make_unique<DaviesBouldin>();
    case IndexKind::PS: return std::make_unique<PartitionSeparation>();
    case IndexKind::CONN: break;
  }
  throw ConfigError("conn is a prototype-level index; use ConnIndex with a SMART network");
}

namespace {
bool any_needs_covariance(const std::vector<IndexKind>& kinds) {
  return std::any_of(kinds.begin(), kinds.end(), needs_covariance);
}
}  // namespace

Evaluator::Evaluator(std::size_t dim, std::vector<IndexKind> kinds, EvaluatorOptions options)
    : kinds_(std::move(kinds)),
      options_(options),
      clusters_(dim, any_needs_covariance(kinds_), options.epsilon) {
  for (std::size_t a = 0; a < kinds_.size(); ++a) {
    for (std::size_t b = a + 1; b < kinds_.size(); ++b) {
      if (kinds_[a] == kinds_[b]) throw ConfigError("duplicate index: " + std::string(index_name(kinds_[a])));
    }
  }
  for (IndexKind k : kinds_) indices_.push_back(make_index(k, options_.params));
}

Evaluator::Evaluator(const Evaluator& other)
    : kinds_(other.kinds_), options_(other.options_), clusters_(other.clusters_) {
  for (const auto& idx : other.indices_) indices_.push_back(idx->clone());
}

Evaluator& Evaluator::operator=(const Evaluator& other) {
  if (this != &other) {
    Evaluator tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

StepInfo Evaluator::observe(const Vector& x, Label label) {
  const StepInfo step = clusters_.observe(x, label);
  for (auto& idx : indices_) idx->update(clusters_, step);
  return step;
}

std::optional<double> Evaluator::value(IndexKind kind) const {
  if (clusters_.k() < options_.min_clusters) return std::nullopt;
  return index(kind).value();
}

const ValidityIndex& Evaluator::index(IndexKind kind) const {
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    if (kinds_[i] == kind) return *indices_[i];
  }
  throw StateError("index not active: " + std::string(index_name(kind)));
}

}  // namespace icvi
