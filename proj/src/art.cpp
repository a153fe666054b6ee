// SPDX-License-Identifier: Apache-2.0
#include "icvi/art.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "icvi/error.hpp"

namespace icvi {

namespace {

constexpr int kFormatVersion = 1;

}  // namespace

Vector complement_code(const Vector& x) {
  const auto d = x.size();
  if (d == 0) throw DimensionError("dimension must be at least 1");
  Vector out(2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double v = x[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DataError("component " + std::to_string(i) + " = " + std::to_string(v) + " is outside [0, 1]");
    }
    out[i] = v;
    out[d + i] = 1.0 - v;
  }
  return out;
}

void validate(const ArtParams& p) {
  if (!(p.rho >= 0.0 && p.rho <= 1.0)) throw ConfigError("vigilance must lie in [0, 1]");
  if (!(p.alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!(p.beta > 0.0 && p.beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
}

// ---------------------------------------------------------------------------
// FuzzyArt

FuzzyArt::FuzzyArt(std::size_t dim, ArtParams params) : dim_(dim), params_(params) {
  if (dim == 0) throw DimensionError("dimension must be at least 1");
  validate(params_);
}

FuzzyArt FuzzyArt::restore(std::size_t dim, ArtParams params, std::vector<Vector> weights) {
  FuzzyArt net(dim, params);
  for (const auto& w : weights) {
    if (static_cast<std::size_t>(w.size()) != 2 * dim) throw DataError("weight vector has wrong length");
    if ((w.array() < 0.0).any() || (w.array() > 1.0).any()) throw DataError("weight outside [0, 1]");
  }
  net.weights_ = std::move(weights);
  return net;
}

void FuzzyArt::check_input(const Vector& input) const {
  if (static_cast<std::size_t>(input.size()) != 2 * dim_) {
    throw DimensionError("complement-coded input must have length " + std::to_string(2 * dim_));
  }
}

double FuzzyArt::activation(std::size_t j, const Vector& input) const {
  const Vector& w = weights_[j];
  return input.cwiseMin(w).sum() / (params_.alpha + w.sum());
}

double FuzzyArt::match(std::size_t j, const Vector& input) const {
  // |I|_1 = d for complement-coded inputs
  return input.cwiseMin(weights_[j]).sum() / static_cast<double>(dim_);
}

std::vector<std::size_t> FuzzyArt::ranked(const Vector& input) const {
  std::vector<double> t(weights_.size());
  for (std::size_t j = 0; j < weights_.size(); ++j) t[j] = activation(j, input);
  std::vector<std::size_t> order(weights_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] > t[b]; });
  return order;
}

std::size_t FuzzyArt::create(const Vector& input) {
  check_input(input);
  weights_.push_back(input);
  return weights_.size() - 1;
}

void FuzzyArt::learn(std::size_t j, const Vector& input) {
  Vector& w = weights_[j];
  w = (1.0 - params_.beta) * w + params_.beta * input.cwiseMin(w);
}

ArtResult FuzzyArt::present(const Vector& input, ArtMode mode) {
  check_input(input);
  if (mode == ArtMode::Evaluation) {
    auto j = evaluate(input);
    if (!j) throw StateError("evaluation on an empty network");
    return {*j, false};
  }
  for (std::size_t j : ranked(input)) {
    if (match(j, input) >= params_.rho) {
      learn(j, input);
      return {j, false};
    }
  }
  return {create(input), true};
}

std::optional<std::size_t> FuzzyArt::evaluate(const Vector& input, std::optional<std::size_t> exclude) const {
  check_input(input);
  // best resonating category, else best overall; strict > keeps the lower id on ties
  std::optional<std::size_t> best_valid;
  std::optional<std::size_t> best_any;
  double t_valid = -1.0;
  double t_any = -1.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    if (exclude && *exclude == j) continue;
    const double t = activation(j, input);
    if (t > t_any) {
      t_any = t;
      best_any = j;
    }
    if (t > t_valid && match(j, input) >= params_.rho) {
      t_valid = t;
      best_valid = j;
    }
  }
  return best_valid ? best_valid : best_any;
}

// ---------------------------------------------------------------------------
// FuzzySmart

namespace {

ArtParams side_params(const SmartParams& p, double rho) { return {rho, p.alpha, p.beta}; }

void validate(const SmartParams& p) {
  if (!(p.rho_a > p.rho_b)) throw ConfigError("SMART requires rho_a > rho_b");
}

}  // namespace

FuzzySmart::FuzzySmart(std::size_t dim, SmartParams params)
    : params_(params), module_a_(dim, side_params(params, params.rho_a)), module_b_(dim, side_params(params, params.rho_b)) {
  validate(params_);
}

FuzzySmart::FuzzySmart(SmartParams params, FuzzyArt a, FuzzyArt b)
    : params_(params), module_a_(std::move(a)), module_b_(std::move(b)) {
  validate(params_);
}

FuzzySmart FuzzySmart::restore(FuzzyArt a, FuzzyArt b, std::vector<ClusterId> map_ab,
                               std::vector<std::size_t> cluster_samples) {
  if (a.dim() != b.dim()) throw DataError("module dimensions differ");
  if (a.params().alpha != b.params().alpha || a.params().beta != b.params().beta) {
    throw DataError("modules must share alpha and beta");
  }
  if (map_ab.size() != a.category_count()) throw DataError("map must cover every A category");
  if (cluster_samples.size() != b.category_count()) throw DataError("cluster sample counts must cover every B category");
  std::vector<bool> hit(b.category_count(), false);
  for (ClusterId c : map_ab) {
    if (c >= b.category_count()) throw DataError("map points to unknown B category");
    hit[c] = true;
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) throw DataError("map is not surjective");
  SmartParams p{a.params().rho, b.params().rho, a.params().alpha, a.params().beta};
  FuzzySmart net(p, std::move(a), std::move(b));
  net.map_ab_ = std::move(map_ab);
  net.cluster_samples_ = std::move(cluster_samples);
  return net;
}

SmartResult FuzzySmart::present(const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw DimensionError("sample has dimension " + std::to_string(x.size()) + ", network expects " +
                         std::to_string(dim()));
  }
  const Vector input = complement_code(x);
  SmartResult out;
  const ArtResult b = module_b_.present(input, ArtMode::Training);
  out.cluster = b.category;
  out.cluster_created = b.created;
  if (b.created) cluster_samples_.push_back(0);
  const std::size_t seen = ++cluster_samples_[b.category];

  std::optional<std::size_t> winner;
  if (seen > 2) {
    double vigilance = params_.rho_a;
    for (std::size_t j : module_a_.ranked(input)) {
      const double m = module_a_.match(j, input);
      if (m < vigilance) continue;
      if (map_ab_[j] == b.category) {
        module_a_.learn(j, input);
        winner = j;
        break;
      }
      // match tracking
      vigilance = std::nextafter(m, std::numeric_limits<double>::infinity());
    }
  }
  if (!winner) {
    winner = module_a_.create(input);
    map_ab_.push_back(b.category);
    out.proto_created = true;
  }
  out.proto = *winner;
  if (module_a_.category_count() > 1) out.second_proto = module_a_.evaluate(input, *winner);
  return out;
}

SmartResult FuzzySmart::evaluate(const Vector& x) const {
  const Vector input = complement_code(x);
  auto first = module_a_.evaluate(input);
  if (!first) throw StateError("evaluation on an empty network");
  SmartResult out;
  out.proto = *first;
  out.cluster = map_ab_[*first];
  if (module_a_.category_count() > 1) out.second_proto = module_a_.evaluate(input, *first);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

json art_document(const FuzzyArt& net) {
  json weights = json::array();
  for (const auto& w : net.weights()) weights.push_back(std::vector<double>(w.data(), w.data() + w.size()));
  return {{"format", "icvi.fuzzy_art"},
          {"version", kFormatVersion},
          {"dim", net.dim()},
          {"rho", net.params().rho},
          {"alpha", net.params().alpha},
          {"beta", net.params().beta},
          {"weights", weights}};
}

FuzzyArt art_from_document(const json& doc) {
  if (doc.value("format", "") != "icvi.fuzzy_art") throw DataError("not a fuzzy ART document");
  if (doc.value("version", 0) != kFormatVersion) throw DataError("unsupported fuzzy ART document version");
  const auto dim = doc.at("dim").get<std::size_t>();
  ArtParams p{doc.at("rho").get<double>(), doc.at("alpha").get<double>(), doc.at("beta").get<double>()};
  std::vector<Vector> weights;
  for (const auto& w : doc.at("weights")) {
    const auto v = w.get<std::vector<double>>();
    weights.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return FuzzyArt::restore(dim, p, std::move(weights));
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed network document: ") + e.what());
  }
}

}  // namespace

std::string to_json(const FuzzyArt& net) { return art_document(net).dump(2); }

std::string to_json(const FuzzySmart& net) {
  json doc = {{"format", "icvi.fuzzy_smart"},
              {"version", kFormatVersion},
              {"module_a", art_document(net.module_a())},
              {"module_b", art_document(net.module_b())},
              {"map_ab", net.map_ab()},
              {"cluster_samples", net.cluster_samples()}};
  return doc.dump(2);
}

FuzzyArt fuzzy_art_from_json(std::string_view text) {
  return guarded([&] { return art_from_document(json::parse(text)); });
}

FuzzySmart fuzzy_smart_from_json(std::string_view text) {
  return guarded([&] {
    const json doc = json::parse(text);
    if (doc.value("format", "") != "icvi.fuzzy_smart") throw DataError("not a fuzzy SMART document");
    if (doc.value("version", 0) != kFormatVersion) throw DataError("unsupported fuzzy SMART document version");
    return FuzzySmart::restore(art_from_document(doc.at("module_a")), art_from_document(doc.at("module_b")),
                               doc.at("map_ab").get<std::vector<ClusterId>>(),
                               doc.at("cluster_samples").get<std::vector<std::size_t>>());
  });
}

}  // namespace icvi
