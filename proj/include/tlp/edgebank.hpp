#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include "tlp/stream.hpp"

namespace tlp {

enum class EdgeBankVariant { infinity, time_window };

/// Memorization baseline: remembers the latest time each pair was observed
/// and predicts 1 for remembered pairs (optionally only within a trailing
/// time window), 0 otherwise.
class EdgeBank {
 public:
  static EdgeBank unbounded() { return EdgeBank(EdgeBankVariant::infinity, std::nullopt); }

  static EdgeBank windowed(double window) {
    return EdgeBank(EdgeBankVariant::time_window, window);
  }

  EdgeBank(EdgeBankVariant variant, std::optional<double> window)
      : variant_(variant), window_(window) {
    if (variant == EdgeBankVariant::infinity) {
      if (window) throw Error("EdgeBank: the unbounded variant takes no window");
    } else {
      if (!window) throw Error("EdgeBank: time_window variant requires a window");
      if (!(*window > 0.0)) throw Error("EdgeBank: window must be positive");
    }
  }

  [[nodiscard]] EdgeBankVariant variant() const { return variant_; }
  [[nodiscard]] std::optional<double> window() const { return window_; }
  [[nodiscard]] std::size_t size() const { return last_seen_.size(); }
  [[nodiscard]] std::optional<Timestamp> watermark() const { return watermark_; }

  void update(const Edge& e) { observe(e.pair, e.timestamp); }

  /// Records a batch; timestamps must not go backwards, across or within
  /// batches.
  void update(std::span<const Edge> batch) {
    for (const Edge& e : batch) observe(e.pair, e.timestamp);
  }

  void observe(const NodePair& pair, Timestamp t) {
    if (watermark_ && t < *watermark_) {
      throw Error("EdgeBank: out-of-order update at t=" + std::to_string(t) +
                  " after t=" + std::to_string(*watermark_));
    }
    watermark_ = t;
    auto [it, inserted] = last_seen_.try_emplace(pair, t);
    if (!inserted && it->second < t) it->second = t;
  }

  [[nodiscard]] std::optional<Timestamp> last_seen(const NodePair& pair) const {
    auto it = last_seen_.find(pair);
    if (it == last_seen_.end()) return std::nullopt;
    return it->second;
  }

  /// Score in {0, 1}. Expired window entries are filtered here rather than
  /// evicted on update.
  [[nodiscard]] double predict(const NodePair& pair, Timestamp now) const {
    auto it = last_seen_.find(pair);
    if (it == last_seen_.end()) return 0.0;
    if (variant_ == EdgeBankVariant::infinity) return 1.0;
    // last_seen <= now holds under the update ordering contract
    return it->second >= now - *window_ ? 1.0 : 0.0;
  }

 private:
  EdgeBankVariant variant_;
  std::optional<double> window_;
  std::unordered_map<NodePair, Timestamp, NodePairHash> last_seen_;
  std::optional<Timestamp> watermark_;
};

inline const char* to_string(EdgeBankVariant v) {
  return v == EdgeBankVariant::infinity ? "inf" : "tw";
}

}  // namespace tlp
