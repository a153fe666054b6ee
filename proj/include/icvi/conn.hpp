// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace icvi {

using PrototypeId = std::size_t;
using ClusterId = std::size_t;
using Count = std::uint64_t;

/// Dense square count matrix that grows by one row/column at a time.
class CountMatrix {
 public:
  std::size_t size() const { return n_; }
  void grow() {
    for (auto& row : rows_) row.push_back(0);
    ++n_;
    rows_.emplace_back(n_, 0);
  }
  Count operator()(std::size_t i, std::size_t j) const { return rows_[i][j]; }
  Count& operator()(std::size_t i, std::size_t j) { return rows_[i][j]; }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<Count>> rows_;
};

/// Incremental Conn_Index over a two-level prototype hierarchy.
///
/// Each sample contributes one (first, second) winning-prototype pair and
/// bumps one CADJ cell. Intra-cluster numerators and the per-(l,m) numerator
/// and denominator of the inter-cluster connectivity are cached and patched
/// for the touched cells only.
///
/// Boundary rules:
///  - while a single prototype exists there is no second winner; samples are
///    tallied per prototype and moved into CADJ(p, new) when the next
///    prototype appears;
///  - a cluster owning one prototype has Intra_Conn = 1;
///  - with a single cluster Inter_Conn = 1, hence the index is 0;
///  - V(l,m) membership uses CONN(i,j) > 0.
class ConnIndex {
 public:
  /// Feeds one presentation. `first` may be the next unused id, in which case
  /// the prototype is created and assigned to `cluster`; `cluster` may be the
  /// next unused cluster id. Throws StateError on unknown ids or a cluster
  /// that disagrees with `first`'s assignment.
  void observe_pair(PrototypeId first, std::optional<PrototypeId> second, ClusterId cluster);

  /// Moves a prototype to another cluster and rebuilds all cached terms.
  void set_prototype_cluster(PrototypeId p, ClusterId cluster);

  double value() const;
  double intra_conn() const;
  double inter_conn() const;
  double intra_conn(ClusterId l) const;
  /// Inter_Conn(l, m); 0 when V(l,m) is empty.
  double inter_conn(ClusterId l, ClusterId m) const;

  std::size_t prototype_count() const { return proto_cluster_.size(); }
  std::size_t cluster_count() const { return cluster_size_.size(); }
  Count samples_seen() const { return samples_; }

  Count cadj(PrototypeId i, PrototypeId j) const { return cadj_(i, j); }
  Count conn(PrototypeId i, PrototypeId j) const { return conn_(i, j); }
  Count instance_count(PrototypeId p) const { return pending_[p]; }
  ClusterId cluster_of(PrototypeId p) const { return proto_cluster_[p]; }
  Count cluster_size(ClusterId l) const { return cluster_size_[l]; }
  Count intra_numerator(ClusterId l) const { return intra_num_[l]; }
  const CountMatrix& cadj_matrix() const { return cadj_; }
  const CountMatrix& conn_matrix() const { return conn_; }
  const std::vector<ClusterId>& prototype_clusters() const { return proto_cluster_; }
  const std::vector<Count>& cluster_sizes() const { return cluster_size_; }

  /// Writes CONN as a headerless P x P CSV block.
  void write_conn_csv(std::ostream& out) const;

 private:
  void add_cluster();
  void add_prototype(ClusterId cluster);
  void increment(PrototypeId a, PrototypeId b, Count c);
  void bump_row(PrototypeId p, PrototypeId q, Count c);
  void rebuild();

  Count samples_ = 0;
  CountMatrix cadj_;
  CountMatrix conn_;
  std::vector<ClusterId> proto_cluster_;
  std::vector<std::size_t> protos_per_cluster_;
  std::vector<Count> pending_;
  std::vector<Count> cluster_size_;
  std::vector<Count> intra_num_;
  std::vector<Count> row_sum_;               // per prototype: sum_j CONN(p, j)
  std::vector<std::vector<Count>> link_;     // [p][m]: sum_{j in m} CONN(p, j)
  std::vector<std::vector<Count>> inter_num_;  // [l][m]
  std::vector<std::vector<Count>> inter_den_;  // [l][m]
};

}  // namespace icvi
