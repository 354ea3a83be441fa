#pragma once

// Random stream generators and brute-force oracles shared by the unit and
// acceptance suites. Oracles here never call into the metric or index code
// they are used to check.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tlp/metrics.hpp"
#include "tlp/stream.hpp"

namespace tlp::testing {

struct StreamShape {
  std::size_t max_edges = 500;
  std::size_t min_nodes = 20;
  std::size_t max_nodes = 60;
  std::size_t max_time = 80;  // timestamps drawn from [0, max_time], so ties are common
  bool directed = true;
};

/// Random stream with a reuse bias so pairs recur, like real interaction data.
inline EdgeStream random_stream(std::mt19937_64& rng, const StreamShape& shape = {}) {
  std::uniform_int_distribution<std::size_t> n_edges(3, shape.max_edges);
  std::uniform_int_distribution<std::size_t> n_nodes(shape.min_nodes, shape.max_nodes);
  const std::size_t n = n_edges(rng);
  const auto nodes = static_cast<std::uint32_t>(n_nodes(rng));
  std::uniform_int_distribution<std::uint32_t> node(0, nodes - 1);
  std::uniform_int_distribution<std::size_t> time(0, shape.max_time);
  std::bernoulli_distribution reuse(0.5);

  std::vector<Edge> edges;
  std::vector<NodePair> used;
  for (std::size_t i = 0; i < n; ++i) {
    NodePair p;
    if (!used.empty() && reuse(rng)) {
      p = used[std::uniform_int_distribution<std::size_t>(0, used.size() - 1)(rng)];
    } else {
      std::uint32_t s = node(rng), d = node(rng);
      while (d == s) d = node(rng);
      p = NodePair{s, d};
      used.push_back(p);
    }
    edges.push_back({p, static_cast<double>(time(rng)), std::nullopt});
  }
  // keep node_count fixed by touching the largest id
  edges.push_back({NodePair{0u, nodes - 1}, static_cast<double>(time(rng)), std::nullopt});
  return build_stream(std::move(edges), shape.directed);
}

inline std::vector<EvalRecord> random_records(std::mt19937_64& rng, std::size_t max_n = 200) {
  std::uniform_int_distribution<std::size_t> size(2, max_n);
  const std::size_t n = size(rng);
  // Coarse score grids force ties; continuous scores exercise the general path.
  const int levels = std::uniform_int_distribution<int>(0, 3)(rng) == 0
                         ? 0
                         : std::uniform_int_distribution<int>(2, 12)(rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EvalRecord> r(n);
  for (auto& rec : r) {
    rec.positive = u(rng) < 0.5;
    rec.score = levels == 0 ? u(rng) : std::floor(u(rng) * levels) / levels;
  }
  r[0].positive = true;
  r[1].positive = false;
  return r;
}

// ---------------------------------------------------------------------------
// Metric oracles

/// Counts every positive/negative pair.
inline double pairwise_auc(const std::vector<EvalRecord>& r) {
  double wins = 0.0;
  double pairs = 0.0;
  for (const auto& p : r) {
    if (!p.positive) continue;
    for (const auto& n : r) {
      if (n.positive) continue;
      pairs += 1.0;
      if (p.score > n.score) wins += 1.0;
      else if (p.score == n.score) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Trapezoidal area under the ROC curve built by sweeping every distinct
/// threshold from high to low.
inline double trapezoid_auc(const std::vector<EvalRecord>& r) {
  std::set<double, std::greater<>> thresholds;
  double n_pos = 0, n_neg = 0;
  for (const auto& x : r) {
    thresholds.insert(x.score);
    (x.positive ? n_pos : n_neg) += 1;
  }
  long double area = 0, prev_fpr = 0, prev_tpr = 0;
  for (double th : thresholds) {
    double tp = 0, fp = 0;
    for (const auto& x : r) {
      if (x.score >= th) (x.positive ? tp : fp) += 1;
    }
    const long double tpr = tp / n_pos, fpr = fp / n_neg;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2;
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  return static_cast<double>(area);
}

/// Enumerates each distinct threshold, recomputing precision and recall from
/// scratch at each one.
inline double enumerated_ap(const std::vector<EvalRecord>& r) {
  std::set<double, std::greater<>> thresholds;
  double n_pos = 0;
  for (const auto& x : r) {
    thresholds.insert(x.score);
    n_pos += x.positive ? 1 : 0;
  }
  long double ap = 0, prev_recall = 0;
  for (double th : thresholds) {
    double tp = 0, predicted = 0;
    for (const auto& x : r) {
      if (x.score >= th) {
        predicted += 1;
        tp += x.positive ? 1 : 0;
      }
    }
    const long double recall = tp / n_pos;
    ap += (recall - prev_recall) * (tp / predicted);
    prev_recall = recall;
  }
  return static_cast<double>(ap);
}

// ---------------------------------------------------------------------------
// Index oracles

inline std::set<std::pair<std::uint32_t, std::uint32_t>> pairs_in(const EdgeStream& s,
                                                                  std::size_t begin,
                                                                  std::size_t end) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::size_t i = begin; i < end; ++i) {
    out.emplace(s[i].pair.source.value, s[i].pair.destination.value);
  }
  return out;
}

/// Literal reading of the novelty formula: for each distinct t, compare the
/// pairs at t against all pairs with any occurrence at an earlier time.
inline double brute_novelty(const EdgeStream& s) {
  std::set<double> times;
  for (const auto& e : s.edges()) times.insert(e.timestamp);
  long double sum = 0;
  for (double t : times) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> now, before;
    for (const auto& e : s.edges()) {
      const auto key = std::make_pair(e.pair.source.value, e.pair.destination.value);
      if (e.timestamp == t) now.insert(key);
      if (e.timestamp < t) before.insert(key);
    }
    std::size_t fresh = 0;
    for (const auto& p : now) fresh += before.count(p) ? 0 : 1;
    sum += static_cast<long double>(fresh) / now.size();
  }
  return static_cast<double>(sum / times.size());
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("tlp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
  return p;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace tlp::testing
