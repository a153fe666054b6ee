// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <random>
#include <sstream>

#include "icvi/batch.hpp"
#include "icvi/conn.hpp"
#include "icvi/error.hpp"

using namespace icvi;

namespace {

Count cadj_total(const ConnIndex& c) {
  Count total = 0;
  for (std::size_t i = 0; i < c.prototype_count(); ++i) {
    total += c.instance_count(i);
    for (std::size_t j = 0; j < c.prototype_count(); ++j) total += c.cadj(i, j);
  }
  return total;
}

}  // namespace

TEST_CASE("the first sample is tallied without a partner") {
  ConnIndex c;
  c.observe_pair(0, std::nullopt, 0);
  CHECK(c.prototype_count() == 1);
  CHECK(c.instance_count(0) == 1);
  CHECK(c.cadj(0, 0) == 0);
  CHECK(c.value() == 0.0);
}

TEST_CASE("solo tallies move into CADJ when a second prototype appears") {
  ConnIndex c;
  for (int i = 0; i < 5; ++i) c.observe_pair(0, std::nullopt, 0);
  c.observe_pair(1, 0, 0);
  CHECK(c.cadj(0, 1) == 5);
  CHECK(c.cadj(1, 0) == 1);
  CHECK(c.instance_count(0) == 0);
  CHECK(c.conn(0, 1) == 6);
  CHECK(cadj_total(c) == c.samples_seen());
}

TEST_CASE("CONN is symmetric") {
  ConnIndex c;
  c.observe_pair(0, std::nullopt, 0);
  c.observe_pair(1, 0, 0);
  c.observe_pair(0, 1, 0);
  c.observe_pair(1, 0, 0);
  CHECK(c.conn(0, 1) == c.conn(1, 0));
  CHECK(c.cadj(0, 1) == 2);  // pending transfer plus one direct presentation
  CHECK(c.cadj(1, 0) == 2);
}

TEST_CASE("a pair seen in both orders counts twice") {
  ConnIndex c;
  c.observe_pair(0, std::nullopt, 0);
  c.observe_pair(1, 0, 0);
  c.observe_pair(2, 0, 1);
  const Count base = c.conn(1, 2);
  c.observe_pair(1, 2, 0);
  c.observe_pair(2, 1, 1);
  CHECK(c.conn(1, 2) == base + 2);
  CHECK(c.conn(2, 1) == base + 2);
}

TEST_CASE("boundary defaults") {
  ConnIndex one;
  one.observe_pair(0, std::nullopt, 0);
  CHECK(one.value() == 0.0);

  ConnIndex single_cluster;
  single_cluster.observe_pair(0, std::nullopt, 0);
  single_cluster.observe_pair(1, 0, 0);
  single_cluster.observe_pair(0, 1, 0);
  CHECK(single_cluster.inter_conn() == 1.0);
  CHECK(single_cluster.value() == 0.0);

  // one-prototype clusters are fully intra-connected
  ConnIndex lone;
  lone.observe_pair(0, std::nullopt, 0);
  lone.observe_pair(1, 0, 1);
  CHECK(lone.intra_conn(0) == 1.0);
  CHECK(lone.intra_conn(1) == 1.0);
}

TEST_CASE("perfectly separated clusters score one") {
  CountMatrix cadj;
  for (int i = 0; i < 4; ++i) cadj.grow();
  cadj(0, 1) = 3;
  cadj(1, 0) = 2;
  cadj(2, 3) = 4;
  cadj(3, 2) = 1;
  CHECK(batch_conn(cadj, {0, 0, 1, 1}, {5, 5}) == 1.0);
}

TEST_CASE("inter-cluster connectivity uses CONN > 0 membership") {
  CountMatrix cadj;
  for (int i = 0; i < 4; ++i) cadj.grow();
  cadj(0, 1) = 4;  // intra cluster 0
  cadj(0, 2) = 1;  // prototype 0 touches cluster 1
  cadj(2, 3) = 5;  // intra cluster 1
  const std::vector<ClusterId> map = {0, 0, 1, 1};
  const std::vector<Count> sizes = {5, 5};
  // V(0,1) = {0}: CONN(0,2)=1 over row sum 5; V(1,0) = {2}: 1 over 6
  const double inter = (1.0 / 5.0 + 1.0 / 6.0) / 2.0;
  const double intra = (4.0 / 5.0 + 5.0 / 5.0) / 2.0;
  CHECK(batch_conn(cadj, map, sizes) == doctest::Approx(intra * (1.0 - inter)).epsilon(1e-15));
}

TEST_CASE("invalid ids are rejected") {
  ConnIndex c;
  CHECK_THROWS_AS(c.observe_pair(1, std::nullopt, 0), StateError);
  c.observe_pair(0, std::nullopt, 0);
  CHECK_THROWS_AS(c.observe_pair(0, std::nullopt, 1), StateError);
  CHECK_THROWS_AS(c.observe_pair(1, 0, 3), StateError);
  CHECK_THROWS_AS(c.observe_pair(0, 0, 0), StateError);
  c.observe_pair(1, 0, 1);
  CHECK_THROWS_AS(c.observe_pair(0, std::nullopt, 0), StateError);
}

TEST_CASE("random replays agree with the batch formula and keep invariants") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    ConnIndex c;
    for (int t = 0; t < 400; ++t) {
      const std::size_t P = c.prototype_count();
      PrototypeId first;
      ClusterId cluster;
      if (P == 0 || rng() % 12 == 0) {
        first = P;
        cluster = (c.cluster_count() == 0 || rng() % 3 == 0) ? c.cluster_count() : rng() % c.cluster_count();
      } else {
        first = rng() % P;
        cluster = c.cluster_of(first);
      }
      std::optional<PrototypeId> second;
      const std::size_t after = first == P ? P + 1 : P;
      if (after > 1) {
        do {
          second = rng() % P;
        } while (*second == first);
      }
      c.observe_pair(first, second, cluster);

      const double v = c.value();
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(cadj_total(c) == c.samples_seen());
      for (std::size_t l = 0; l < c.cluster_count(); ++l) {
        CHECK(c.intra_numerator(l) <= c.cluster_size(l));
        for (std::size_t m = 0; m < c.cluster_count(); ++m) {
          if (l == m) continue;
          CHECK(c.inter_conn(l, m) >= 0.0);
          CHECK(c.inter_conn(l, m) <= 1.0);
        }
      }
      for (std::size_t i = 0; i < c.prototype_count(); ++i) {
        for (std::size_t j = 0; j < c.prototype_count(); ++j) CHECK(c.conn(i, j) == c.conn(j, i));
      }
      CHECK(std::abs(v - batch_conn(c.cadj_matrix(), c.prototype_clusters(), c.cluster_sizes())) <= 1e-12);
    }
  }
}

TEST_CASE("moving a prototype rebuilds the cached terms") {
  ConnIndex c;
  c.observe_pair(0, std::nullopt, 0);
  c.observe_pair(1, 0, 0);
  c.observe_pair(2, 1, 1);
  c.observe_pair(3, 2, 1);
  c.observe_pair(0, 1, 0);
  c.set_prototype_cluster(1, 1);
  CHECK(c.cluster_of(1) == 1);
  CHECK(std::abs(c.value() - batch_conn(c.cadj_matrix(), c.prototype_clusters(), c.cluster_sizes())) <= 1e-12);
}

TEST_CASE("CONN export") {
  ConnIndex c;
  c.observe_pair(0, std::nullopt, 0);
  c.observe_pair(1, 0, 0);
  std::ostringstream out;
  c.write_conn_csv(out);
  CHECK(out.str() == "0,2\n2,0\n");
}
