// SPDX-License-Identifier: Apache-2.0
// icvi: command-line front end over the C API.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "icvi/icvi.h"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Failure {
  int code;
  std::string message;
};

int exit_code(icvi_status s) {
  switch (s) {
    case ICVI_OK: return 0;
    case ICVI_ERR_CONFIG: return kExitConfig;
    case ICVI_ERR_DATA:
    case ICVI_ERR_DIMENSION: return kExitData;
    default: return 1;
  }
}

void check(icvi_status s) {
  if (s != ICVI_OK) throw Failure{exit_code(s), std::string(icvi_status_string(s)) + ": " + icvi_last_error()};
}

std::string take(char* s) {
  std::string out(s ? s : "");
  icvi_string_free(s);
  return out;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw Failure{kExitConfig, "cannot open config " + path};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Failure{kExitConfig, std::string("malformed config: ") + e.what()};
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("ICVI_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Failure{kExitConfig, std::string("ICVI_SEED is not an unsigned integer: ") + s};
  }
}

// Flags shared by run and sweep-conn; each one overrides the config file.
struct Overrides {
  std::string config;
  std::string data;
  bool unlabeled = false;
  std::string generator;
  std::optional<std::uint64_t> generator_seed;
  std::optional<double> rho;
  std::optional<double> rho_a;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> epsilon;
  std::string model;
  std::string presentation;
  std::optional<std::uint64_t> seed;
  std::string indices;
  std::string sigma_data;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config, "JSON experiment config");
    app->add_option("--data", data, "input CSV (features + trailing integer label)");
    app->add_flag("--unlabeled", unlabeled, "input CSV has no label column");
    app->add_option("--generator", generator, "built-in dataset: d4 or r15");
    app->add_option("--generator-seed", generator_seed, "seed of the generated dataset");
    app->add_option("--rho", rho, "clustering vigilance");
    app->add_option("--rho-a", rho_a, "prototype vigilance (SMART)");
    app->add_option("--alpha", alpha, "choice parameter");
    app->add_option("--beta", beta, "learning rate");
    app->add_option("--epsilon", epsilon, "covariance regularization exponent");
    app->add_option("--model", model, "auto, fuzzy_art or smart");
    app->add_option("--presentation", presentation, "cluster-by-cluster, as-is or shuffled");
    app->add_option("--seed", seed, "presentation seed (default: $ICVI_SEED, then config)");
    app->add_option("--indices", indices, "comma-separated index names");
    app->add_option("--sigma-data", sigma_data, "incremental or batch");
  }

  void apply(json& c) const {
    if (!data.empty()) c["data"] = {{"path", data}, {"labels", !unlabeled}};
    if (!generator.empty()) {
      c["data"] = {{"generator", generator}};
    }
    if (generator_seed) c["data"]["seed"] = *generator_seed;
    if (rho) c["rho"] = *rho;
    if (rho_a) c["rho_a"] = *rho_a;
    if (alpha) c["alpha"] = *alpha;
    if (beta) c["beta"] = *beta;
    if (epsilon) c["epsilon"] = *epsilon;
    if (!model.empty()) c["model"] = model;
    if (!presentation.empty()) c["presentation"] = presentation;
    if (seed) {
      c["seed"] = *seed;
    } else if (auto s = env_seed()) {
      c["seed"] = *s;
    }
    if (!indices.empty()) {
      json names = json::array();
      std::stringstream ss(indices);
      for (std::string name; std::getline(ss, name, ',');) {
        if (!name.empty()) names.push_back(name);
      }
      c["indices"] = names;
    }
    if (!sigma_data.empty()) c["sigma_data"] = sigma_data;
  }
};

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitData, "cannot write " + path};
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental cluster validity indices over fuzzy ART / SMART streams"};
  app.require_subcommand(1);
  app.set_version_flag("--version", icvi_version());

  Overrides run_opts;
  std::string records;
  std::string summary;
  std::string gnuplot;
  std::string conn_matrix;
  auto* run = app.add_subcommand("run", "stream a dataset and record per-step index values");
  run_opts.attach(run);
  run->add_option("--records", records, "per-step CSV output");
  run->add_option("--summary", summary, "JSON summary output (also printed)");
  run->add_option("--gnuplot", gnuplot, "companion gnuplot script");
  run->add_option("--conn-matrix", conn_matrix, "final CONN matrix CSV (SMART only)");

  std::string gen_name = "d4";
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  bool gen_normalize = false;
  auto* generate = app.add_subcommand("generate", "write a built-in dataset as labeled CSV");
  generate->add_option("name", gen_name, "d4 or r15")->required();
  generate->add_option("--seed", gen_seed, "generator seed");
  generate->add_option("-o,--out", gen_out, "output CSV")->required();
  generate->add_flag("--normalize", gen_normalize, "min-max normalize before writing");

  Overrides sweep_opts;
  std::vector<double> grid;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep-conn", "incremental vs batch Conn_Index over a rho_a grid");
  sweep_opts.attach(sweep);
  sweep->add_option("--grid", grid, "rho_a values")->delimiter(',');
  sweep->add_option("-o,--out", sweep_out, "JSON report (default stdout)");

  std::string batch_data;
  bool batch_normalize = false;
  std::string batch_out;
  auto* batch = app.add_subcommand("batch-eval", "batch indices of a labeled CSV partition");
  batch->add_option("data", batch_data, "CSV with trailing integer label column")->required();
  batch->add_flag("--normalize", batch_normalize, "min-max normalize features first");
  batch->add_option("-o,--out", batch_out, "JSON report (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      json c = load_config(run_opts.config);
      run_opts.apply(c);
      if (!records.empty()) c["outputs"]["records"] = records;
      if (!summary.empty()) c["outputs"]["summary"] = summary;
      if (!gnuplot.empty()) c["outputs"]["gnuplot"] = gnuplot;
      if (!conn_matrix.empty()) c["outputs"]["conn_matrix"] = conn_matrix;
      char* out = nullptr;
      check(icvi_run_experiment(c.dump().c_str(), &out));
      std::cout << take(out);
    } else if (*generate) {
      check(icvi_generate_dataset(gen_name.c_str(), gen_seed, gen_normalize ? 1 : 0, gen_out.c_str()));
    } else if (*sweep) {
      json c = load_config(sweep_opts.config);
      sweep_opts.apply(c);
      if (!grid.empty()) c["sweep_rho_a"] = grid;
      char* out = nullptr;
      check(icvi_sweep_conn(c.dump().c_str(), &out));
      write_or_print(take(out), sweep_out);
    } else if (*batch) {
      char* out = nullptr;
      check(icvi_batch_eval(batch_data.c_str(), batch_normalize ? 1 : 0, &out));
      write_or_print(take(out), batch_out);
    }
  } catch (const Failure& f) {
    std::cerr << "icvi: " << f.message << '\n';
    return f.code;
  }
  return 0;
}
