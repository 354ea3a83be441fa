#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace tlp {

/// Raised for every contract violation the library detects (bad input,
/// malformed files, degenerate sampling). Callers at the CLI boundary turn it
/// into a diagnostic and a nonzero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense node index assigned at ingestion.
struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

/// Identity of an edge with time stripped. In undirected streams the pair is
/// stored with source <= destination (see `NodePair::canonical`).
struct NodePair {
  NodeId source;
  NodeId destination;

  constexpr NodePair() = default;
  constexpr NodePair(NodeId s, NodeId d) : source(s), destination(d) {}
  constexpr NodePair(std::uint32_t s, std::uint32_t d)
      : source(s), destination(d) {}

  [[nodiscard]] constexpr NodePair canonical(bool directed) const {
    if (directed || source <= destination) return *this;
    return {destination, source};
  }

  [[nodiscard]] constexpr std::uint64_t key() const {
    return (std::uint64_t{source.value} << 32) | destination.value;
  }

  friend constexpr auto operator<=>(const NodePair&, const NodePair&) = default;
};

struct NodePairHash {
  std::size_t operator()(const NodePair& p) const noexcept {
    // splitmix64 finalizer; std::hash<uint64_t> is the identity on libstdc++
    std::uint64_t z = p.key() + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

using PairSet = std::unordered_set<NodePair, NodePairHash>;

using Timestamp = double;

}  // namespace tlp
