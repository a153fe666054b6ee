// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "icvi/error.hpp"
#include "icvi/harness.hpp"

namespace icvi {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <typename T>
bool parse_number(std::string_view cell, T& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::string where(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

// Portable draws: the engine's output sequence is fixed by the standard,
// the distribution adaptors are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::size_t below(std::size_t n) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r = engine_();
    while (r >= limit) r = engine_();
    return static_cast<std::size_t>(r % bound);
  }

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1),
                                                       first + static_cast<std::ptrdiff_t>(below(i)));
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct Blob {
  double x;
  double y;
  double sx;
  double sy;
  std::size_t count;
};

Dataset sample_blobs(const std::vector<Blob>& blobs, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  Label label = 1;
  for (const auto& b : blobs) {
    for (std::size_t i = 0; i < b.count; ++i) {
      Vector x(2);
      x[0] = b.x + b.sx * rng.normal();
      x[1] = b.y + b.sy * rng.normal();
      data.samples.push_back(std::move(x));
      data.labels.push_back(label);
    }
    ++label;
  }
  return data;
}

}  // namespace

Dataset parse_csv(std::istream& in, bool has_labels) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    const bool header_candidate = first_content;
    first_content = false;

    std::vector<double> values;
    std::optional<std::size_t> bad;
    const std::size_t features = has_labels ? cells.size() - 1 : cells.size();
    for (std::size_t c = 0; c < features; ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v) || !std::isfinite(v)) {
        bad = c;
        break;
      }
      values.push_back(v);
    }
    Label label = 0;
    if (!bad && has_labels) {
      if (cells.size() < 2 || !parse_number(cells.back(), label)) bad = cells.size() - 1;
    }
    if (bad) {
      if (header_candidate) continue;
      throw DataError("non-numeric cell '" + std::string(cells[*bad]) + "' at " + where(line_no, *bad + 1));
    }
    if (columns == 0) {
      columns = cells.size();
    } else if (cells.size() != columns) {
      throw DataError("ragged row at line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                      " columns, found " + std::to_string(cells.size()));
    }
    data.samples.push_back(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
    if (has_labels) data.labels.push_back(label);
  }
  if (data.samples.empty()) throw DataError("no data rows");
  if (data.dim() == 0) throw DataError("no feature columns");
  return data;
}

void normalize_min_max(Dataset& data) {
  if (data.size() < 2) throw DataError("at least two rows are needed to normalize feature ranges");
  const auto d = static_cast<Eigen::Index>(data.dim());
  Vector lo = data.samples.front();
  Vector hi = data.samples.front();
  for (const auto& x : data.samples) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  for (Eigen::Index c = 0; c < d; ++c) {
    if (!(hi[c] > lo[c])) throw DataError("constant feature in column " + std::to_string(c + 1));
  }
  const Vector range = hi - lo;
  for (auto& x : data.samples) {
    x = ((x - lo).array() / range.array()).cwiseMax(0.0).cwiseMin(1.0).matrix();
  }
}

Dataset ingest(const std::filesystem::path& path, bool has_labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  Dataset data = parse_csv(in, has_labels);
  normalize_min_max(data);
  return data;
}

void write_csv(const Dataset& data, std::ostream& out) {
  std::array<char, 32> buf{};
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (Eigen::Index c = 0; c < data.samples[i].size(); ++c) {
      if (c) out << ',';
      const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), data.samples[i][c]);
      out.write(buf.data(), r.ptr - buf.data());
    }
    if (data.labeled()) out << ',' << data.labels[i];
    out << '\n';
  }
}

Dataset generate_d4(std::uint64_t seed) {
  return sample_blobs({{0.0, 0.0, 0.45, 0.45, 500},
                       {5.0, 0.5, 0.55, 0.40, 500},
                       {0.5, 5.0, 0.40, 0.60, 500},
                       {5.5, 5.5, 0.70, 0.70, 500}},
                      seed);
}

Dataset generate_r15(std::uint64_t seed, const RingLayout& g) {
  constexpr double kCenter = 10.0;
  const double s = g.spread;
  const std::size_t n = g.per_cluster;
  std::vector<Blob> blobs;
  for (int i = 0; i < 7; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 7.0;
    blobs.push_back({kCenter + g.outer_radius * std::cos(a), kCenter + g.outer_radius * std::sin(a), s, s, n});
  }
  blobs.push_back({kCenter, kCenter, s, s, n});
  for (int i = 0; i < 7; ++i) {
    const double a = 2.0 * std::numbers::pi * (i + 0.5) / 7.0;
    blobs.push_back({kCenter + g.inner_radius * std::cos(a), kCenter + g.inner_radius * std::sin(a), s, s, n});
  }
  return sample_blobs(blobs, seed);
}

Dataset generate(std::string_view name, std::uint64_t seed) {
  if (name == "d4") return generate_d4(seed);
  if (name == "r15") return generate_r15(seed);
  throw ConfigError("unknown generator '" + std::string(name) + "'");
}

Presentation parse_presentation(std::string_view name) {
  if (name == "cluster-by-cluster") return Presentation::ClusterByCluster;
  if (name == "as-is") return Presentation::AsIs;
  if (name == "shuffled") return Presentation::Shuffled;
  throw ConfigError("unknown presentation '" + std::string(name) + "'");
}

std::string_view presentation_name(Presentation p) {
  switch (p) {
    case Presentation::ClusterByCluster: return "cluster-by-cluster";
    case Presentation::AsIs: return "as-is";
    case Presentation::Shuffled: return "shuffled";
  }
  return "as-is";
}

std::vector<std::size_t> presentation_order(const Dataset& data, Presentation mode, std::uint64_t seed,
                                            const std::vector<Label>& cluster_order) {
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  switch (mode) {
    case Presentation::AsIs:
      return order;
    case Presentation::Shuffled:
      rng.shuffle(order.begin(), order.end());
      return order;
    case Presentation::ClusterByCluster:
      break;
  }
  if (!data.labeled()) throw ConfigError("cluster-by-cluster presentation needs labels");
  std::map<Label, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < data.size(); ++i) groups[data.labels[i]].push_back(i);

  std::vector<Label> sequence;
  if (cluster_order.empty()) {
    for (const auto& [label, rows] : groups) sequence.push_back(label);
  } else {
    sequence = cluster_order;
    auto sorted = sequence;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Label> present;
    for (const auto& [label, rows] : groups) present.push_back(label);
    if (sorted != present) throw ConfigError("cluster order must list every label exactly once");
  }
  order.clear();
  for (Label label : sequence) {
    auto rows = groups[label];
    rng.shuffle(rows.begin(), rows.end());
    order.insert(order.end(), rows.begin(), rows.end());
  }
  return order;
}

}  // namespace icvi
