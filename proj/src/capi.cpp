// SPDX-License-Identifier: Apache-2.0
#include "icvi/icvi.h"

#include <cstring>
#include <fstream>
#include <map>
#include <new>
#include <string>

#include "json.hpp"

#include "icvi/art.hpp"
#include "icvi/batch.hpp"
#include "icvi/conn.hpp"
#include "icvi/error.hpp"
#include "icvi/harness.hpp"
#include "icvi/indices.hpp"

struct icvi_evaluator {
  icvi::Evaluator impl;
};

struct icvi_smart {
  icvi::FuzzySmart net;
  icvi::ConnIndex conn;
};

struct icvi_conn {
  icvi::ConnIndex impl;
};

namespace {

thread_local std::string last_error;

template <typename F>
icvi_status guard(F&& f) noexcept {
  try {
    last_error.clear();
    f();
    return ICVI_OK;
  } catch (const icvi::ConfigError& e) {
    last_error = e.what();
    return ICVI_ERR_CONFIG;
  } catch (const icvi::DimensionError& e) {
    last_error = e.what();
    return ICVI_ERR_DIMENSION;
  } catch (const icvi::DataError& e) {
    last_error = e.what();
    return ICVI_ERR_DATA;
  } catch (const icvi::StateError& e) {
    last_error = e.what();
    return ICVI_ERR_STATE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return ICVI_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ICVI_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return ICVI_ERR_INTERNAL;
  }
}

char* to_c_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

icvi::Vector to_vector(const double* x, std::size_t dim) {
  return Eigen::Map<const icvi::Vector>(x, static_cast<Eigen::Index>(dim));
}

std::vector<icvi::IndexKind> parse_kinds(const char* list) {
  std::vector<icvi::IndexKind> kinds;
  std::string_view s(list);
  while (!s.empty()) {
    const auto comma = s.find(',');
    auto name = s.substr(0, comma);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (!name.empty()) {
      const auto kind = icvi::parse_index_kind(name);
      if (!kind) throw icvi::ConfigError("unknown index '" + std::string(name) + "'");
      kinds.push_back(*kind);
    }
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return kinds;
}

}  // namespace

#define ICVI_REQUIRE(p)                  \
  do {                                   \
    if ((p) == nullptr) {                \
      last_error = #p " is NULL";        \
      return ICVI_ERR_NULL;              \
    }                                    \
  } while (0)

extern "C" {

const char* icvi_version(void) { return "1.0.0"; }

const char* icvi_status_string(icvi_status status) {
  switch (status) {
    case ICVI_OK: return "ok";
    case ICVI_ERR_CONFIG: return "configuration error";
    case ICVI_ERR_DATA: return "data error";
    case ICVI_ERR_DIMENSION: return "dimension mismatch";
    case ICVI_ERR_STATE: return "invalid state";
    case ICVI_ERR_NULL: return "null argument";
    case ICVI_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* icvi_last_error(void) { return last_error.c_str(); }

void icvi_string_free(char* s) { delete[] s; }

icvi_status icvi_evaluator_create(size_t dim, const char* indices, double epsilon, icvi_evaluator** out) {
  ICVI_REQUIRE(indices);
  ICVI_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    icvi::EvaluatorOptions opts;
    opts.epsilon = epsilon;
    *out = new icvi_evaluator{icvi::Evaluator(dim, parse_kinds(indices), opts)};
  });
}

void icvi_evaluator_destroy(icvi_evaluator* ev) { delete ev; }

icvi_status icvi_evaluator_observe(icvi_evaluator* ev, const double* x, size_t dim, int64_t label) {
  ICVI_REQUIRE(ev);
  ICVI_REQUIRE(x);
  return guard([&] { ev->impl.observe(to_vector(x, dim), label); });
}

icvi_status icvi_evaluator_value(const icvi_evaluator* ev, const char* index, double* value, int* defined) {
  ICVI_REQUIRE(ev);
  ICVI_REQUIRE(index);
  ICVI_REQUIRE(value);
  ICVI_REQUIRE(defined);
  return guard([&] {
    const auto kind = icvi::parse_index_kind(index);
    if (!kind) throw icvi::ConfigError("unknown index '" + std::string(index) + "'");
    const auto v = ev->impl.value(*kind);
    *defined = v ? 1 : 0;
    *value = v.value_or(0.0);
  });
}

icvi_status icvi_evaluator_cluster_count(const icvi_evaluator* ev, size_t* k) {
  ICVI_REQUIRE(ev);
  ICVI_REQUIRE(k);
  *k = ev->impl.clusters().k();
  return ICVI_OK;
}

icvi_status icvi_smart_create(size_t dim, double rho_a, double rho_b, double alpha, double beta, icvi_smart** out) {
  ICVI_REQUIRE(out);
  *out = nullptr;
  return guard([&] {
    *out = new icvi_smart{icvi::FuzzySmart(dim, icvi::SmartParams{rho_a, rho_b, alpha, beta}), {}};
  });
}

void icvi_smart_destroy(icvi_smart* net) { delete net; }

icvi_status icvi_smart_present(icvi_smart* net, const double* x, size_t dim, icvi_smart_step* step) {
  ICVI_REQUIRE(net);
  ICVI_REQUIRE(x);
  ICVI_REQUIRE(step);
  return guard([&] {
    const auto r = net->net.present(to_vector(x, dim));
    net->conn.observe_pair(r.proto, r.second_proto, r.cluster);
    step->prototype = r.proto;
    step->cluster = r.cluster;
    step->has_second = r.second_proto ? 1 : 0;
    step->second_prototype = r.second_proto.value_or(0);
    step->prototype_created = r.proto_created ? 1 : 0;
    step->cluster_created = r.cluster_created ? 1 : 0;
    step->conn = net->conn.value();
  });
}

icvi_status icvi_smart_counts(const icvi_smart* net, size_t* prototypes, size_t* clusters) {
  ICVI_REQUIRE(net);
  ICVI_REQUIRE(prototypes);
  ICVI_REQUIRE(clusters);
  *prototypes = net->net.prototype_count();
  *clusters = net->net.cluster_count();
  return ICVI_OK;
}

icvi_status icvi_smart_to_json(const icvi_smart* net, char** json) {
  ICVI_REQUIRE(net);
  ICVI_REQUIRE(json);
  *json = nullptr;
  return guard([&] { *json = to_c_string(icvi::to_json(net->net)); });
}

icvi_status icvi_conn_create(icvi_conn** out) {
  ICVI_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new icvi_conn{}; });
}

void icvi_conn_destroy(icvi_conn* conn) { delete conn; }

icvi_status icvi_conn_observe(icvi_conn* conn, size_t first, int has_second, size_t second, size_t cluster) {
  ICVI_REQUIRE(conn);
  return guard([&] {
    conn->impl.observe_pair(first, has_second ? std::optional<std::size_t>(second) : std::nullopt, cluster);
  });
}

icvi_status icvi_conn_value(const icvi_conn* conn, double* value) {
  ICVI_REQUIRE(conn);
  ICVI_REQUIRE(value);
  *value = conn->impl.value();
  return ICVI_OK;
}

icvi_status icvi_run_experiment(const char* config_json, char** summary_json) {
  ICVI_REQUIRE(config_json);
  ICVI_REQUIRE(summary_json);
  *summary_json = nullptr;
  return guard([&] {
    const auto config = icvi::config_from_json(config_json);
    const auto result = icvi::run_experiment(config);
    *summary_json = to_c_string(icvi::summary_json(result, config));
  });
}

icvi_status icvi_sweep_conn(const char* config_json, char** report_json) {
  ICVI_REQUIRE(config_json);
  ICVI_REQUIRE(report_json);
  *report_json = nullptr;
  return guard([&] {
    const auto config = icvi::config_from_json(config_json);
    const auto data = icvi::load_dataset(config);
    *report_json = to_c_string(icvi::sweep_json(icvi::compare_conn(config, data)));
  });
}

icvi_status icvi_generate_dataset(const char* name, uint64_t seed, int normalize, const char* path) {
  ICVI_REQUIRE(name);
  ICVI_REQUIRE(path);
  return guard([&] {
    auto data = icvi::generate(name, seed);
    if (normalize) icvi::normalize_min_max(data);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw icvi::DataError(std::string("cannot write ") + path);
    icvi::write_csv(data, out);
  });
}

icvi_status icvi_batch_eval(const char* csv_path, int normalize, char** report_json) {
  ICVI_REQUIRE(csv_path);
  ICVI_REQUIRE(report_json);
  *report_json = nullptr;
  return guard([&] {
    std::ifstream in(csv_path);
    if (!in) throw icvi::DataError(std::string("cannot open ") + csv_path);
    auto data = icvi::parse_csv(in, true);
    if (normalize) icvi::normalize_min_max(data);
    // dense relabeling onto 1..k in ascending label order
    std::map<icvi::Label, icvi::Label> dense;
    for (auto l : data.labels) dense.emplace(l, 0);
    icvi::Label next = 1;
    for (auto& [l, d] : dense) d = next++;
    std::vector<icvi::Label> labels;
    for (auto l : data.labels) labels.push_back(dense[l]);
    const icvi::Partition partition(data.samples, labels);

    using nlohmann::json;
    const std::pair<const char*, icvi::BatchCvi> forms[] = {
        {"ch", icvi::BatchCvi::CH},   {"i", icvi::BatchCvi::I},       {"sil", icvi::BatchCvi::CentroidSIL},
        {"sample_sil", icvi::BatchCvi::SIL}, {"ni", icvi::BatchCvi::NI}, {"rcip", icvi::BatchCvi::RCIP},
        {"rh", icvi::BatchCvi::RH},   {"xb", icvi::BatchCvi::XB},     {"db", icvi::BatchCvi::DB},
        {"ps", icvi::BatchCvi::PS}};
    json values = json::object();
    for (const auto& [name, kind] : forms) {
      const auto v = icvi::batch_cvi(partition, kind);
      values[name] = v ? json(*v) : json(nullptr);
    }
    json doc = {{"samples", partition.size()}, {"dim", partition.dim()}, {"k", partition.k()}, {"values", values}};
    *report_json = to_c_string(doc.dump(2) + "\n");
  });
}

}  // extern "C"
