// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icvi/conn.hpp"
#include "icvi/stats.hpp"

namespace icvi {

/// (x, 1 - x). Rejects components outside [0, 1].
Vector complement_code(const Vector& x);

enum class ArtMode { Training, Evaluation };

struct ArtParams {
  double rho = 0.75;    // vigilance, [0, 1]
  double alpha = 1e-3;  // choice parameter, > 0
  double beta = 1.0;    // learning rate, (0, 1]
};

void validate(const ArtParams& params);

struct ArtResult {
  std::size_t category = 0;
  bool created = false;
};

/// Fuzzy ART over complement-coded inputs.
class FuzzyArt {
 public:
  FuzzyArt(std::size_t dim, ArtParams params);

  std::size_t dim() const { return dim_; }
  const ArtParams& params() const { return params_; }
  std::size_t category_count() const { return weights_.size(); }
  const Vector& weight(std::size_t j) const { return weights_[j]; }
  const std::vector<Vector>& weights() const { return weights_; }

  /// Training: resonance search in activation order, learn or create.
  /// Evaluation: no learning or creation; falls back to the most activated category.
  ArtResult present(const Vector& input, ArtMode mode = ArtMode::Training);

  /// Evaluation-mode winner, optionally ignoring one category. nullopt when
  /// no eligible category exists.
  std::optional<std::size_t> evaluate(const Vector& input, std::optional<std::size_t> exclude = std::nullopt) const;

  double activation(std::size_t j, const Vector& input) const;
  /// |min(I, w_j)|_1 / |I|_1, compared against vigilance.
  double match(std::size_t j, const Vector& input) const;
  /// Category ids by descending activation; ties keep the lower id first.
  std::vector<std::size_t> ranked(const Vector& input) const;

  std::size_t create(const Vector& input);
  void learn(std::size_t j, const Vector& input);

  /// Rebuilds a network from serialized parts.
  static FuzzyArt restore(std::size_t dim, ArtParams params, std::vector<Vector> weights);

 private:
  void check_input(const Vector& input) const;

  std::size_t dim_;
  ArtParams params_;
  std::vector<Vector> weights_;
};

struct SmartParams {
  double rho_a = 0.9;  // prototype level, must exceed rho_b
  double rho_b = 0.75;
  double alpha = 1e-3;
  double beta = 1.0;
};

struct SmartResult {
  PrototypeId proto = 0;
  ClusterId cluster = 0;
  std::optional<PrototypeId> second_proto;
  bool proto_created = false;
  bool cluster_created = false;
};

/// Auto-associative fuzzy ARTMAP: module B clusters, module A forms prototypes
/// mapped surjectively onto B categories.
///
/// Map conflicts on the A side are resolved by match tracking: vigilance is
/// raised just above the conflicting category's match and the search resumes;
/// an exhausted search creates a new A category. The first two samples of
/// every new B cluster each create their own A prototype.
class FuzzySmart {
 public:
  FuzzySmart(std::size_t dim, SmartParams params);

  std::size_t dim() const { return module_a_.dim(); }
  const SmartParams& params() const { return params_; }
  const FuzzyArt& module_a() const { return module_a_; }
  const FuzzyArt& module_b() const { return module_b_; }
  const std::vector<ClusterId>& map_ab() const { return map_ab_; }
  std::size_t cluster_count() const { return module_b_.category_count(); }
  std::size_t prototype_count() const { return module_a_.category_count(); }

  /// Training presentation of a normalized sample.
  SmartResult present(const Vector& x);
  /// Evaluation mode: A-side winner, its mapped cluster and the runner-up.
  SmartResult evaluate(const Vector& x) const;

  static FuzzySmart restore(FuzzyArt a, FuzzyArt b, std::vector<ClusterId> map_ab,
                            std::vector<std::size_t> cluster_samples);
  const std::vector<std::size_t>& cluster_samples() const { return cluster_samples_; }

 private:
  FuzzySmart(SmartParams params, FuzzyArt a, FuzzyArt b);

  SmartParams params_;
  FuzzyArt module_a_;
  FuzzyArt module_b_;
  std::vector<ClusterId> map_ab_;
  std::vector<std::size_t> cluster_samples_;
};

/// Versioned JSON documents for replay reproducibility.
std::string to_json(const FuzzyArt& net);
std::string to_json(const FuzzySmart& net);
FuzzyArt fuzzy_art_from_json(std::string_view text);
FuzzySmart fuzzy_smart_from_json(std::string_view text);

}  // namespace icvi
