#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tlp/stream.hpp"
#include "tlp/text.hpp"

namespace tlp {

enum class InputFormat { interaction, edgelist };

struct ParseOptions {
  bool directed = true;
  // Feature columns are always validated; storing them is optional since the
  // evaluation pipeline never reads them.
  bool keep_features = true;
};

struct ParseReport {
  std::size_t edges_read = 0;
  std::size_t nodes_assigned = 0;
  std::size_t lines_skipped = 0;  // blank lines only
  std::size_t feature_dim = 0;
};

struct ParsedStream {
  EdgeStream stream;
  ParseReport report;
  // Original token for each dense id (edge-list format only).
  std::vector<std::string> node_labels;
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::filesystem::path& path, std::size_t line,
                                    const std::string& what) {
  throw Error(path.string() + ":" + std::to_string(line) + ": " + what);
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace detail

/// Parses `user_id,item_id,timestamp,state_label,f1..fk`. Users and items
/// share one id space with items placed after the largest user id.
inline ParsedStream parse_interaction_csv(const std::filesystem::path& path,
                                          const ParseOptions& options = {}) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) detail::parse_fail(path, 1, "empty file (header expected)");

  struct Row {
    std::uint32_t user;
    std::uint32_t item;
    double t;
  };
  std::vector<Row> rows;
  FeatureMatrix features;
  ParseReport report;
  std::vector<std::string_view> fields;
  std::size_t arity = 0;
  std::size_t line_no = 1;
  std::uint32_t max_user = 0;
  std::uint32_t max_item = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) {
      ++report.lines_skipped;
      continue;
    }
    text::split(line, ',', fields);
    if (arity == 0) {
      if (fields.size() < 4) {
        detail::parse_fail(path, line_no, "expected at least 4 columns, got " +
                                              std::to_string(fields.size()));
      }
      arity = fields.size();
      features.dim = arity - 4;
    } else if (fields.size() != arity) {
      detail::parse_fail(path, line_no, "expected " + std::to_string(arity) +
                                            " columns, got " + std::to_string(fields.size()));
    }
    const auto user = text::parse_index(fields[0]);
    const auto item = text::parse_index(fields[1]);
    const auto t = text::parse_double(fields[2]);
    if (!user) detail::parse_fail(path, line_no, "bad user id '" + std::string(fields[0]) + "'");
    if (!item) detail::parse_fail(path, line_no, "bad item id '" + std::string(fields[1]) + "'");
    if (!t) detail::parse_fail(path, line_no, "bad timestamp '" + std::string(fields[2]) + "'");
    if (!text::parse_double(fields[3])) {
      detail::parse_fail(path, line_no, "bad state label '" + std::string(fields[3]) + "'");
    }
    for (std::size_t k = 4; k < arity; ++k) {
      const auto f = text::parse_double(fields[k]);
      if (!f) detail::parse_fail(path, line_no, "bad feature value in column " + std::to_string(k + 1));
      if (options.keep_features) features.values.push_back(*f);
    }
    max_user = std::max(max_user, *user);
    max_item = std::max(max_item, *item);
    rows.push_back({*user, *item, *t});
  }
  if (rows.empty()) detail::parse_fail(path, line_no, "no data rows");

  const std::uint64_t user_count = std::uint64_t{max_user} + 1;
  if (user_count + max_item >= 0xffffffffULL) throw Error(path.string() + ": node ids overflow");
  std::vector<Edge> edges;
  edges.reserve(rows.size());
  for (const Row& r : rows) {
    edges.push_back(Edge{
        NodePair{r.user, static_cast<std::uint32_t>(user_count + r.item)}, r.t, std::nullopt});
  }
  report.edges_read = rows.size();
  report.feature_dim = features.dim;
  ParsedStream out{build_stream(std::move(edges), options.directed, std::move(features),
                                path.stem().string()),
                   report,
                   {}};
  out.report.nodes_assigned = out.stream.node_count();
  return out;
}

/// Parses `source,destination,timestamp[,weight]` with an optional header.
/// Id tokens are densified in first-seen order after sorting by time.
inline ParsedStream parse_edgelist_csv(const std::filesystem::path& path,
                                       const ParseOptions& options = {}) {
  std::ifstream in = detail::open_input(path);

  struct Row {
    std::string source;
    std::string destination;
    double t;
    std::optional<double> weight;
  };
  std::vector<Row> rows;
  ParseReport report;
  std::vector<std::string_view> fields;
  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0;
  bool first_content = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) {
      ++report.lines_skipped;
      continue;
    }
    text::split(line, ',', fields);
    if (first_content) {
      first_content = false;
      if (fields.size() < 3 || !text::parse_double(fields[2])) continue;  // header
    }
    if (fields.size() != 3 && fields.size() != 4) {
      detail::parse_fail(path, line_no,
                         "expected 3 or 4 columns, got " + std::to_string(fields.size()));
    }
    if (arity == 0) {
      arity = fields.size();
    } else if (fields.size() != arity) {
      detail::parse_fail(path, line_no, "expected " + std::to_string(arity) +
                                            " columns, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) detail::parse_fail(path, line_no, "empty node id");
    const auto t = text::parse_double(fields[2]);
    if (!t) detail::parse_fail(path, line_no, "bad timestamp '" + std::string(fields[2]) + "'");
    std::optional<double> weight;
    if (arity == 4) {
      weight = text::parse_double(fields[3]);
      if (!weight) detail::parse_fail(path, line_no, "bad weight '" + std::string(fields[3]) + "'");
    }
    rows.push_back({std::string(fields[0]), std::string(fields[1]), *t, weight});
  }
  if (rows.empty()) throw Error(path.string() + ": no data rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.t < b.t; });

  ParsedStream out;
  std::unordered_map<std::string, std::uint32_t> ids;
  auto densify = [&](const std::string& token) {
    auto [it, inserted] = ids.try_emplace(token, static_cast<std::uint32_t>(ids.size()));
    if (inserted) out.node_labels.push_back(token);
    return it->second;
  };
  std::vector<Edge> edges;
  edges.reserve(rows.size());
  for (const Row& r : rows) {
    const std::uint32_t s = densify(r.source);
    const std::uint32_t d = densify(r.destination);
    edges.push_back(Edge{NodePair{s, d}, r.t, r.weight});
  }
  report.edges_read = rows.size();
  report.nodes_assigned = ids.size();
  out.stream = build_stream(std::move(edges), options.directed, {}, path.stem().string());
  out.report = report;
  return out;
}

inline ParsedStream parse_stream(const std::filesystem::path& path, InputFormat format,
                                 const ParseOptions& options = {}) {
  return format == InputFormat::interaction ? parse_interaction_csv(path, options)
                                            : parse_edgelist_csv(path, options);
}

/// Writes the stream in edge-list format using dense ids.
inline void write_edgelist_csv(const EdgeStream& stream, std::ostream& out) {
  const bool weighted = std::any_of(stream.edges().begin(), stream.edges().end(),
                                    [](const Edge& e) { return e.weight.has_value(); });
  out << (weighted ? "source,destination,timestamp,weight\n" : "source,destination,timestamp\n");
  for (const Edge& e : stream.edges()) {
    out << e.pair.source.value << ',' << e.pair.destination.value << ','
        << text::format_double(e.timestamp);
    if (weighted) out << ',' << text::format_double(e.weight.value_or(1.0));
    out << '\n';
  }
}

}  // namespace tlp
