// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "icvi/icvi.h"

TEST_CASE("status strings and version") {
  CHECK(std::string(icvi_version()) == "1.0.0");
  CHECK(std::string(icvi_status_string(ICVI_ERR_CONFIG)) == "configuration error");
  CHECK(std::string(icvi_status_string(static_cast<icvi_status>(42))) == "unknown status");
}

TEST_CASE("evaluator lifecycle") {
  icvi_evaluator* ev = nullptr;
  REQUIRE(icvi_evaluator_create(2, "ch, xb,db", 12.0, &ev) == ICVI_OK);
  const double pts[4][2] = {{0.0, 0.0}, {1.0, 0.0}, {0.2, 0.0}, {0.8, 0.0}};
  const int64_t labels[4] = {1, 2, 1, 2};
  double v = -1.0;
  int defined = -1;
  for (int i = 0; i < 4; ++i) {
    REQUIRE(icvi_evaluator_observe(ev, pts[i], 2, labels[i]) == ICVI_OK);
    REQUIRE(icvi_evaluator_value(ev, "ch", &v, &defined) == ICVI_OK);
    if (i == 0) CHECK(defined == 0);
  }
  CHECK(defined == 1);
  CHECK(v == doctest::Approx(32.0));
  size_t k = 0;
  CHECK(icvi_evaluator_cluster_count(ev, &k) == ICVI_OK);
  CHECK(k == 2);

  CHECK(icvi_evaluator_observe(ev, pts[0], 3, 1) == ICVI_ERR_DIMENSION);
  CHECK(std::string(icvi_last_error()).find("dimension") != std::string::npos);
  CHECK(icvi_evaluator_value(ev, "sil", &v, &defined) == ICVI_ERR_STATE);
  CHECK(icvi_evaluator_value(ev, "nope", &v, &defined) == ICVI_ERR_CONFIG);
  CHECK(icvi_evaluator_value(ev, "db", nullptr, &defined) == ICVI_ERR_NULL);
  icvi_evaluator_destroy(ev);

  icvi_evaluator* bad = reinterpret_cast<icvi_evaluator*>(0x1);
  CHECK(icvi_evaluator_create(2, "conn", 12.0, &bad) == ICVI_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(icvi_evaluator_create(2, "ch,ch", 12.0, &bad) == ICVI_ERR_CONFIG);
  icvi_evaluator_destroy(nullptr);
}

TEST_CASE("SMART stream with Conn_Index") {
  icvi_smart* net = nullptr;
  CHECK(icvi_smart_create(2, 0.7, 0.7, 1e-3, 1.0, &net) == ICVI_ERR_CONFIG);
  REQUIRE(icvi_smart_create(2, 0.9, 0.7, 1e-3, 1.0, &net) == ICVI_OK);
  icvi_smart_step step{};
  const double a[2] = {0.1, 0.1};
  const double b[2] = {0.9, 0.9};
  REQUIRE(icvi_smart_present(net, a, 2, &step) == ICVI_OK);
  CHECK(step.cluster_created == 1);
  CHECK(step.has_second == 0);
  CHECK(step.conn == 0.0);
  REQUIRE(icvi_smart_present(net, a, 2, &step) == ICVI_OK);
  CHECK(step.prototype_created == 1);
  CHECK(step.has_second == 1);
  REQUIRE(icvi_smart_present(net, b, 2, &step) == ICVI_OK);
  CHECK(step.cluster == 1);
  CHECK(step.conn >= 0.0);
  CHECK(step.conn <= 1.0);
  size_t p = 0, c = 0;
  CHECK(icvi_smart_counts(net, &p, &c) == ICVI_OK);
  CHECK(p == 3);
  CHECK(c == 2);

  const double out_of_range[2] = {1.5, 0.0};
  CHECK(icvi_smart_present(net, out_of_range, 2, &step) == ICVI_ERR_DATA);
  CHECK(icvi_smart_present(net, a, 1, &step) == ICVI_ERR_DIMENSION);

  char* json = nullptr;
  REQUIRE(icvi_smart_to_json(net, &json) == ICVI_OK);
  CHECK(std::string(json).find("icvi.fuzzy_smart") != std::string::npos);
  icvi_string_free(json);
  icvi_smart_destroy(net);
}

TEST_CASE("standalone Conn_Index") {
  icvi_conn* conn = nullptr;
  REQUIRE(icvi_conn_create(&conn) == ICVI_OK);
  CHECK(icvi_conn_observe(conn, 0, 0, 0, 0) == ICVI_OK);
  CHECK(icvi_conn_observe(conn, 1, 1, 0, 0) == ICVI_OK);
  CHECK(icvi_conn_observe(conn, 5, 1, 0, 0) == ICVI_ERR_STATE);
  double v = -1.0;
  CHECK(icvi_conn_value(conn, &v) == ICVI_OK);
  CHECK(v == 0.0);  // one cluster
  CHECK(icvi_conn_value(nullptr, &v) == ICVI_ERR_NULL);
  icvi_conn_destroy(conn);
}

TEST_CASE("harness entry points") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string csv = (dir / "icvi_capi_d4.csv").string();
  REQUIRE(icvi_generate_dataset("d4", 7, 0, csv.c_str()) == ICVI_OK);
  CHECK(icvi_generate_dataset("iris", 7, 0, csv.c_str()) == ICVI_ERR_CONFIG);

  char* report = nullptr;
  REQUIRE(icvi_batch_eval(csv.c_str(), 1, &report) == ICVI_OK);
  CHECK(std::string(report).find("\"k\": 4") != std::string::npos);
  icvi_string_free(report);
  CHECK(icvi_batch_eval("/nonexistent/file.csv", 1, &report) == ICVI_ERR_DATA);

  const std::string config = R"({"data": {"path": ")" + csv + R"("}, "presentation": "shuffled", "seed": 3,
      "rho": 0.55, "indices": ["ch", "conn"]})";
  char* summary = nullptr;
  REQUIRE(icvi_run_experiment(config.c_str(), &summary) == ICVI_OK);
  CHECK(std::string(summary).find("\"prototypes\"") != std::string::npos);
  icvi_string_free(summary);

  CHECK(icvi_run_experiment("{\"rho\": 2}", &summary) == ICVI_ERR_CONFIG);
  CHECK(summary == nullptr);
  CHECK(icvi_run_experiment(nullptr, &summary) == ICVI_ERR_NULL);
  CHECK(icvi_sweep_conn(config.c_str(), &report) == ICVI_ERR_CONFIG);  // no grid
  std::remove(csv.c_str());
}
