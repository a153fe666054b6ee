// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <random>

#include "icvi/batch.hpp"
#include "icvi/error.hpp"
#include "support/oracle.hpp"

using namespace icvi;
using oracle::vec;

namespace {

Partition four_points() {
  return Partition({vec({0.0, 0.0}), vec({0.2, 0.0}), vec({1.0, 0.0}), vec({0.8, 0.0})}, {1, 1, 2, 2});
}

}  // namespace

TEST_CASE("partition validation") {
  CHECK_THROWS_AS(Partition({}, {}), DataError);
  CHECK_THROWS_AS(Partition({vec({0.0})}, {1, 1}), DataError);
  CHECK_THROWS_AS(Partition({vec({0.0}), vec({1.0})}, {1, 3}), DataError);
  CHECK_THROWS_AS(Partition({vec({0.0}), vec({1.0, 0.0})}, {1, 2}), DimensionError);
}

TEST_CASE("four-point hand values") {
  const auto p = four_points();
  CHECK(*batch_cvi(p, BatchCvi::CH) == doctest::Approx(32.0).epsilon(1e-12));
  CHECK(*batch_cvi(p, BatchCvi::XB) == doctest::Approx(0.015625).epsilon(1e-12));
  CHECK(*batch_cvi(p, BatchCvi::DB) == doctest::Approx(0.03125).epsilon(1e-12));
  CHECK(*batch_cvi(p, BatchCvi::I) == doctest::Approx(29.5936).epsilon(1e-12));
  CHECK(*batch_cvi(p, BatchCvi::PS) == doctest::Approx(2.0 * (1.0 - std::exp(-4.0))).epsilon(1e-12));

  // unsquared norms: DB with p = q = 1 is (0.1 + 0.1) / 0.8
  BatchCviParams plain;
  plain.use_squared_norms = false;
  plain.db_p = 1.0;
  plain.db_q = 1.0;
  CHECK(*batch_cvi(p, BatchCvi::DB, plain) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("silhouette of two singletons") {
  const Partition p({vec({0.0, 0.0}), vec({1.0, 1.0})}, {1, 2});
  CHECK(*batch_cvi(p, BatchCvi::SIL) == 1.0);
  CHECK(*batch_cvi(p, BatchCvi::CentroidSIL) == 1.0);
}

TEST_CASE("negentropy of the identity partition is zero") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.5, 0.1);
  std::vector<Vector> xs;
  for (int i = 0; i < 80; ++i) xs.push_back(vec({nd(rng), nd(rng), nd(rng)}));
  const Partition p(xs, std::vector<Label>(xs.size(), 1));
  CHECK(std::abs(*batch_cvi(p, BatchCvi::NI)) < 1e-12);
  CHECK_FALSE(batch_cvi(p, BatchCvi::CH).has_value());
  CHECK(*batch_cvi(p, BatchCvi::RCIP) == 0.0);
}

TEST_CASE("conn is not a centroid-level batch index") {
  CHECK_THROWS_AS(batch_cvi(four_points(), IndexKind::CONN), ConfigError);
}

TEST_CASE("batch values ignore sample order and cluster naming") {
  const auto s = oracle::planted_stream(13, 120, 2, 3);
  const auto dense = oracle::dense_labels(s.labels);
  const Partition base(s.samples, dense);

  std::vector<std::size_t> perm(s.samples.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Vector> xs;
  std::vector<Label> ls;
  for (auto i : perm) {
    xs.push_back(s.samples[i]);
    ls.push_back(4 - dense[i]);  // 1 <-> 3
  }
  const Partition moved(xs, ls);
  for (auto kind : {BatchCvi::CH, BatchCvi::DB, BatchCvi::XB, BatchCvi::I, BatchCvi::SIL, BatchCvi::CentroidSIL,
                    BatchCvi::PS, BatchCvi::NI, BatchCvi::RCIP, BatchCvi::RH}) {
    CHECK(oracle::close(*batch_cvi(base, kind), *batch_cvi(moved, kind), 1e-10, 1e-14));
  }
}

TEST_CASE("adjusted Rand index") {
  const std::vector<Label> a = {1, 1, 2, 2, 3, 3};
  CHECK(adjusted_rand_index(a, a) == 1.0);
  CHECK(adjusted_rand_index(a, {7, 7, 5, 5, 9, 9}) == 1.0);
  CHECK(adjusted_rand_index({1, 1, 1, 1}, {1, 1, 2, 2}) == 0.0);

  // six-item contingency example checked against pair enumeration
  const std::vector<Label> x = {1, 1, 1, 2, 2, 3};
  const std::vector<Label> y = {1, 1, 2, 2, 3, 3};
  const double ref = oracle::pair_ari(x, y);
  CHECK(adjusted_rand_index(x, y) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(adjusted_rand_index(y, x) == doctest::Approx(ref).epsilon(1e-14));
  // 1 same-same pair of 15; 4 pairs together in x, 3 in y
  CHECK(ref == doctest::Approx((1.0 - 4.0 * 3.0 / 15.0) / (3.5 - 4.0 * 3.0 / 15.0)).epsilon(1e-14));

  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    std::vector<Label> p(40);
    std::vector<Label> q(40);
    for (auto& v : p) v = static_cast<Label>(rng() % 4);
    for (auto& v : q) v = static_cast<Label>(rng() % 5);
    CHECK(adjusted_rand_index(p, q) == doctest::Approx(oracle::pair_ari(p, q)).epsilon(1e-12));
    CHECK(adjusted_rand_index(p, q) == adjusted_rand_index(q, p));
  }

  CHECK_THROWS_AS(adjusted_rand_index({1, 2}, {1}), DataError);
  CHECK_THROWS_AS(adjusted_rand_index({1}, {1}), DataError);
}
