// SPDX-License-Identifier: Apache-2.0
#include "icvi/conn.hpp"

#include <algorithm>
#include <string>

#include "icvi/error.hpp"

namespace icvi {

void ConnIndex::add_cluster() {
  const std::size_t k = cluster_size_.size() + 1;
  cluster_size_.push_back(0);
  intra_num_.push_back(0);
  protos_per_cluster_.push_back(0);
  for (auto& row : link_) row.push_back(0);
  for (auto& row : inter_num_) row.push_back(0);
  for (auto& row : inter_den_) row.push_back(0);
  inter_num_.emplace_back(k, 0);
  inter_den_.emplace_back(k, 0);
}

void ConnIndex::add_prototype(ClusterId cluster) {
  cadj_.grow();
  conn_.grow();
  proto_cluster_.push_back(cluster);
  protos_per_cluster_[cluster] += 1;
  pending_.push_back(0);
  row_sum_.push_back(0);
  link_.emplace_back(cluster_size_.size(), 0);
}

void ConnIndex::observe_pair(PrototypeId first, std::optional<PrototypeId> second, ClusterId cluster) {
  const std::size_t P = prototype_count();
  if (cluster > cluster_count()) {
    throw StateError("unknown cluster id " + std::to_string(cluster));
  }
  if (first > P) throw StateError("unknown prototype id " + std::to_string(first));
  if (second && (*second >= P || *second == first)) {
    throw StateError("invalid second winner " + std::to_string(*second));
  }
  if (first < P && proto_cluster_[first] != cluster) {
    throw StateError("prototype " + std::to_string(first) + " belongs to cluster " +
                     std::to_string(proto_cluster_[first]) + ", not " + std::to_string(cluster));
  }
  if (!second && P + (first == P ? 1 : 0) > 1) {
    throw StateError("a second winner is required once two prototypes exist");
  }

  if (cluster == cluster_count()) add_cluster();
  if (first == P) add_prototype(cluster);

  ++samples_;
  cluster_size_[cluster] += 1;

  if (!second) {
    pending_[first] += 1;
    return;
  }
  // solo-prototype tallies move into CADJ once a partner exists
  for (PrototypeId p = 0; p < prototype_count(); ++p) {
    if (pending_[p] > 0 && p != first) {
      const Count c = pending_[p];
      pending_[p] = 0;
      increment(p, first, c);
    }
  }
  increment(first, *second, 1);
}

void ConnIndex::increment(PrototypeId a, PrototypeId b, Count c) {
  cadj_(a, b) += c;
  conn_(a, b) += c;
  conn_(b, a) += c;
  if (proto_cluster_[a] == proto_cluster_[b]) intra_num_[proto_cluster_[a]] += c;
  bump_row(a, b, c);
  bump_row(b, a, c);
}

// CONN(p, q) grew by c: patch row_sum, link and the (cluster(p), m) terms.
void ConnIndex::bump_row(PrototypeId p, PrototypeId q, Count c) {
  const ClusterId l = proto_cluster_[p];
  const ClusterId mq = proto_cluster_[q];
  auto& link = link_[p];
  for (ClusterId m = 0; m < link.size(); ++m) {
    if (m != l && link[m] > 0) inter_den_[l][m] += c;
  }
  if (mq != l && link[mq] == 0) inter_den_[l][mq] += row_sum_[p] + c;
  row_sum_[p] += c;
  link[mq] += c;
  inter_num_[l][mq] += c;
}

void ConnIndex::rebuild() {
  const std::size_t P = prototype_count();
  const std::size_t k = cluster_count();
  std::fill(protos_per_cluster_.begin(), protos_per_cluster_.end(), 0);
  for (ClusterId c : proto_cluster_) protos_per_cluster_[c] += 1;
  std::fill(intra_num_.begin(), intra_num_.end(), 0);
  for (auto& row : link_) std::fill(row.begin(), row.end(), 0);
  for (auto& row : inter_num_) std::fill(row.begin(), row.end(), 0);
  for (auto& row : inter_den_) std::fill(row.begin(), row.end(), 0);
  std::fill(row_sum_.begin(), row_sum_.end(), 0);

  for (PrototypeId i = 0; i < P; ++i) {
    for (PrototypeId j = 0; j < P; ++j) {
      if (proto_cluster_[i] == proto_cluster_[j]) intra_num_[proto_cluster_[i]] += cadj_(i, j);
      link_[i][proto_cluster_[j]] += conn_(i, j);
      row_sum_[i] += conn_(i, j);
    }
  }
  for (PrototypeId i = 0; i < P; ++i) {
    const ClusterId l = proto_cluster_[i];
    for (ClusterId m = 0; m < k; ++m) {
      inter_num_[l][m] += link_[i][m];
      if (m != l && link_[i][m] > 0) inter_den_[l][m] += row_sum_[i];
    }
  }
}

void ConnIndex::set_prototype_cluster(PrototypeId p, ClusterId cluster) {
  if (p >= prototype_count()) throw StateError("unknown prototype id " + std::to_string(p));
  if (cluster >= cluster_count()) throw StateError("unknown cluster id " + std::to_string(cluster));
  if (proto_cluster_[p] == cluster) return;
  proto_cluster_[p] = cluster;
  rebuild();
}

double ConnIndex::intra_conn(ClusterId l) const {
  if (protos_per_cluster_[l] <= 1) return 1.0;
  return static_cast<double>(intra_num_[l]) / static_cast<double>(cluster_size_[l]);
}

double ConnIndex::inter_conn(ClusterId l, ClusterId m) const {
  if (l == m || inter_den_[l][m] == 0) return 0.0;
  return static_cast<double>(inter_num_[l][m]) / static_cast<double>(inter_den_[l][m]);
}

double ConnIndex::intra_conn() const {
  const std::size_t k = cluster_count();
  if (k == 0) return 0.0;
  double sum = 0.0;
  for (ClusterId l = 0; l < k; ++l) sum += intra_conn(l);
  return sum / static_cast<double>(k);
}

double ConnIndex::inter_conn() const {
  const std::size_t k = cluster_count();
  if (k <= 1) return 1.0;
  double sum = 0.0;
  for (ClusterId l = 0; l < k; ++l) {
    double worst = 0.0;
    for (ClusterId m = 0; m < k; ++m) {
      if (m != l) worst = std::max(worst, inter_conn(l, m));
    }
    sum += worst;
  }
  return sum / static_cast<double>(k);
}

double ConnIndex::value() const {
  if (cluster_count() == 0) return 0.0;
  return intra_conn() * (1.0 - inter_conn());
}

void ConnIndex::write_conn_csv(std::ostream& out) const {
  const std::size_t P = prototype_count();
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = 0; j < P; ++j) {
      if (j) out << ',';
      out << conn_(i, j);
    }
    out << '\n';
  }
}

}  // namespace icvi
