// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "icvi/error.hpp"
#include "icvi/harness.hpp"

using namespace icvi;

namespace {

Dataset parse(const std::string& text, bool labels = true) {
  std::istringstream in(text);
  return parse_csv(in, labels);
}

std::string message_of(const std::string& text) {
  try {
    Dataset d = parse(text);
    normalize_min_max(d);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

std::string records_text(const RunResult& r) {
  std::ostringstream out;
  write_records_csv(r, out);
  return out.str();
}

ExperimentConfig d4_config() {
  ExperimentConfig c;
  c.generator = "d4";
  c.generator_seed = 1;
  c.presentation = Presentation::Shuffled;
  c.seed = 1;
  c.rho = 0.6;
  return c;
}

}  // namespace

TEST_CASE("CSV parsing") {
  const auto d = parse("x,y,label\n0.5,1,2\n 1.5 , +2 ,1\n\n2.5,3,2\n");
  CHECK(d.size() == 3);
  CHECK(d.dim() == 2);
  CHECK(d.labels == std::vector<Label>{2, 1, 2});
  CHECK(d.samples[1][1] == 2.0);

  const auto u = parse("0.1,0.2,0.3\n0.4,0.5,0.6\n", false);
  CHECK(u.dim() == 3);
  CHECK_FALSE(u.labeled());
}

TEST_CASE("CSV errors carry positions") {
  CHECK(message_of("1,2,1\n3,abc,1\n") == "non-numeric cell 'abc' at line 2, column 2");
  CHECK(message_of("1,2,1\n3,4\n").find("ragged row at line 2") == 0);
  CHECK(message_of("1,2,1\n1,3,2\n") == "constant feature in column 1");
  CHECK(message_of("1,2,1\n") == "at least two rows are needed to normalize feature ranges");
  CHECK(message_of("a,b\n") == "no data rows");
  CHECK(message_of("1,2,x\n3,4,1\n5,6,2\n").empty());  // first line read as header
  CHECK(message_of("1,2,1\n3,4,1.5\n").find("non-numeric cell '1.5'") == 0);
}

TEST_CASE("normalization maps onto the unit box and keeps unit data fixed") {
  auto d = parse("0,1,1\n1,0,1\n0.25,0.5,2\n");
  const auto before = d.samples;
  normalize_min_max(d);
  CHECK(d.samples == before);

  auto e = parse("-2,10,1\n2,30,1\n0,15,2\n");
  normalize_min_max(e);
  CHECK(e.samples[2][0] == 0.5);
  CHECK(e.samples[2][1] == 0.25);
}

TEST_CASE("ingest reads a file") {
  const auto path = std::filesystem::temp_directory_path() / "icvi_ingest_test.csv";
  {
    std::ofstream out(path);
    out << "0,0,1\n4,2,2\n2,1,1\n";
  }
  const auto d = ingest(path, true);
  CHECK(d.samples[1] == Vector::Ones(2));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ingest(path, true), DataError);
}

TEST_CASE("generated D4 shape and determinism") {
  const auto a = generate_d4(3);
  const auto b = generate_d4(3);
  const auto c = generate_d4(4);
  CHECK(a.size() == 2000);
  CHECK(a.dim() == 2);
  std::map<Label, int> counts;
  for (Label l : a.labels) counts[l]++;
  CHECK(counts == std::map<Label, int>{{1, 500}, {2, 500}, {3, 500}, {4, 500}});
  std::ostringstream sa, sb, sc;
  write_csv(a, sa);
  write_csv(b, sb);
  write_csv(c, sc);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() != sc.str());

  const auto r = generate_r15(1);
  CHECK(r.size() == 600);
  CHECK(std::set<Label>(r.labels.begin(), r.labels.end()).size() == 15);
  CHECK_THROWS_AS(generate("iris", 0), ConfigError);
}

TEST_CASE("presentation orders") {
  Dataset d;
  for (Label l : {3, 1, 2, 1, 3, 2}) {
    d.samples.push_back(Vector::Constant(1, static_cast<double>(l)));
    d.labels.push_back(l);
  }
  const auto as_is = presentation_order(d, Presentation::AsIs, 0);
  CHECK(as_is == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});

  auto grouped = presentation_order(d, Presentation::ClusterByCluster, 5);
  std::vector<Label> seq;
  for (auto i : grouped) seq.push_back(d.labels[i]);
  CHECK(seq == std::vector<Label>{1, 1, 2, 2, 3, 3});

  grouped = presentation_order(d, Presentation::ClusterByCluster, 5, {3, 1, 2});
  seq.clear();
  for (auto i : grouped) seq.push_back(d.labels[i]);
  CHECK(seq == std::vector<Label>{3, 3, 1, 1, 2, 2});

  CHECK_THROWS_AS(presentation_order(d, Presentation::ClusterByCluster, 5, {1, 2}), ConfigError);
  const auto shuffled = presentation_order(d, Presentation::Shuffled, 9);
  CHECK(shuffled == presentation_order(d, Presentation::Shuffled, 9));
  CHECK(std::is_permutation(shuffled.begin(), shuffled.end(), as_is.begin()));
}

TEST_CASE("config parsing and validation") {
  const auto c = config_from_json(R"({"data": {"generator": "r15", "seed": 4}, "rho": 0.6, "rho_a": 0.8,
      "indices": ["db", "conn"], "presentation": "cluster-by-cluster", "cluster_order": [2, 1],
      "sigma_data": "batch", "outputs": {"records": "r.csv"}})");
  CHECK(c.generator == "r15");
  CHECK(c.generator_seed == 4);
  CHECK(c.uses_smart());
  CHECK(c.batch_data_covariance);
  CHECK(c.records_path == "r.csv");
  CHECK(config_from_json(config_to_json(c)).cluster_order == c.cluster_order);

  CHECK_THROWS_AS(config_from_json(R"({"rho": 0.5})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"data": {"generator": "d4"}, "model": "fuzzy_art", "indices": ["conn"]})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"data": {"generator": "d4"}, "indices": ["conn"], "rho": 0.9, "rho_a": 0.9})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"data": {"generator": "d4"}, "indices": ["ch", "ch"]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"data": {"generator": "d4"}, "indices": ["dunn"]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"data": {"generator": "d4"}, "presentation": "as-is", "cluster_order": [1]})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"data": {"generator": "d4"}, "sweep_rho_a": [0.7]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json("[1, 2"), ConfigError);
}

TEST_CASE("an empty index set records only the bookkeeping columns") {
  const auto r = run_experiment(d4_config(), load_dataset(d4_config()));
  const auto text = records_text(r);
  CHECK(text.substr(0, text.find('\n')) == "step,sample_id,cluster,k");
  CHECK(r.records.size() == 2000);
  CHECK(r.ari.has_value());
}

TEST_CASE("records follow the trainer") {
  auto c = d4_config();
  c.indices = {IndexKind::CH, IndexKind::DB, IndexKind::CONN};
  const auto data = load_dataset(c);
  const auto r = run_experiment(c, data);
  std::size_t k = 0;
  std::vector<int> seen(data.size(), 0);
  for (const auto& rec : r.records) {
    CHECK(rec.k >= k);
    CHECK(rec.k == k + (rec.cluster_created ? 1 : 0));
    k = rec.k;
    CHECK(rec.cluster >= 1);
    CHECK(static_cast<std::size_t>(rec.cluster) <= rec.k);
    seen[rec.sample_id] += 1;
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; }));
  CHECK(r.final_k == k);
  CHECK(r.prototypes >= 2 * r.final_k);

  // undefined values serialize as empty cells; the first row has k = 1
  const auto text = records_text(r);
  const auto first_row = text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n') - 1);
  CHECK(first_row.substr(first_row.size() - 4) == ",,,0");
}

TEST_CASE("summary and gnuplot companions") {
  auto c = d4_config();
  c.indices = {IndexKind::XB};
  const auto r = run_experiment(c, load_dataset(c));
  const auto s = summary_json(r, c);
  CHECK(s.find("\"final_k\"") != std::string::npos);
  CHECK(s.find("\"xb\"") != std::string::npos);
  std::ostringstream g;
  write_gnuplot_script(r, "out.csv", g);
  CHECK(g.str().find("plot 'out.csv' using 1:5") != std::string::npos);
}

TEST_CASE("correlation helper") {
  CHECK(*pearson({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
  CHECK(*pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(*pearson({0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}) == 1.0);
  CHECK_FALSE(pearson({1, 1, 1}, {1, 2, 3}).has_value());
  CHECK_FALSE(pearson({1, 2}, {1, 2}).has_value());
}

TEST_CASE("batch shadow bookkeeping") {
  Dataset d;
  for (int i = 0; i < 6; ++i) {
    d.samples.push_back(Vector::Constant(2, i < 3 ? 0.0 : 1.0));
    d.labels.push_back(i < 3 ? 1 : 2);
  }
  ExperimentConfig c;
  c.generator = "d4";
  c.rho = 0.5;
  c.rho_a = 0.9;
  c.sweep_rho_a = {0.9};
  const auto p = compare_conn_point(c, d, 0.9);
  CHECK(p.incremental.size() == 6);
  CHECK(p.creation_steps == std::vector<std::size_t>{0, 3});
  CHECK(p.mse >= 0.0);
}
