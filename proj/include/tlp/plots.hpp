#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tlp/numeric.hpp"
#include "tlp/stream.hpp"
#include "tlp/text.hpp"

namespace tlp {

// ---------------------------------------------------------------------------
// Temporal edge appearance

/// Distinct pairs at one timestamp, split into those seen at an earlier
/// timestamp (repeated) and first appearances (new_count).
struct TeaRow {
  Timestamp t = 0.0;
  std::size_t repeated = 0;
  std::size_t new_count = 0;

  [[nodiscard]] std::size_t total() const { return repeated + new_count; }
};

using TeaSeries = std::vector<TeaRow>;

inline TeaSeries tea_series(const EdgeStream& stream) {
  if (stream.empty()) throw Error("tea_series: empty stream");
  TeaSeries rows;
  PairSet seen;
  PairSet current;
  std::vector<NodePair> fresh;
  const auto edges = stream.edges();
  for (std::size_t i = 0; i < edges.size();) {
    const Timestamp t = edges[i].timestamp;
    current.clear();
    fresh.clear();
    for (; i < edges.size() && edges[i].timestamp == t; ++i) {
      const NodePair p = edges[i].pair;
      if (current.insert(p).second && !seen.contains(p)) fresh.push_back(p);
    }
    rows.push_back({t, current.size() - fresh.size(), fresh.size()});
    seen.insert(fresh.begin(), fresh.end());
  }
  return rows;
}

/// Mean per-row new fraction; agrees with `novelty_index` on the same stream.
inline double tea_novelty(const TeaSeries& series) {
  if (series.empty()) throw Error("tea_novelty: empty series");
  CompensatedSum sum;
  for (const auto& r : series) {
    sum += static_cast<double>(r.new_count) / static_cast<double>(r.total());
  }
  return sum.value() / static_cast<double>(series.size());
}

struct TeaBin {
  Timestamp t_begin = 0.0;
  Timestamp t_end = 0.0;
  std::size_t repeated = 0;
  std::size_t new_count = 0;
};

/// One bin per row when the series fits, otherwise equal-width time bins over
/// [first t, last t]. Empty bins are dropped, so the result never exceeds
/// `bins` entries.
inline std::vector<TeaBin> bin_tea(const TeaSeries& series, std::size_t bins) {
  if (series.empty()) throw Error("bin_tea: empty series");
  if (bins == 0) throw Error("bin_tea: bins must be positive");
  std::vector<TeaBin> out;
  if (series.size() <= bins) {
    for (const auto& r : series) out.push_back({r.t, r.t, r.repeated, r.new_count});
    return out;
  }
  const Timestamp lo = series.front().t;
  const Timestamp hi = series.back().t;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<TeaBin> all(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    all[b].t_begin = lo + width * static_cast<double>(b);
    all[b].t_end = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (const auto& r : series) {
    auto b = static_cast<std::size_t>((r.t - lo) / (hi - lo) * static_cast<double>(bins));
    b = std::min(b, bins - 1);
    all[b].repeated += r.repeated;
    all[b].new_count += r.new_count;
  }
  for (const auto& b : all) {
    if (b.repeated + b.new_count > 0) out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Temporal edge traffic

enum class TetCategory { train_only, transductive, inductive, val_only };

inline const char* to_string(TetCategory c) {
  switch (c) {
    case TetCategory::train_only: return "train_only";
    case TetCategory::transductive: return "transductive";
    case TetCategory::inductive: return "inductive";
    case TetCategory::val_only: return "val_only";
  }
  return "?";
}

struct TetRow {
  NodePair pair;
  Timestamp first_ts = 0.0;
  Timestamp last_ts = 0.0;
  TetCategory category = TetCategory::train_only;
};

/// One row per distinct pair, ordered by first appearance then last
/// appearance. Pairs seen only in validation are `val_only` unless validation
/// counts as history.
inline std::vector<TetRow> tet_rows(const EdgeStream& stream, const ChronoSplit& split,
                                    HistoryMode mode = HistoryMode::train) {
  if (split.total != stream.size()) throw Error("tet_rows: split does not match stream");
  struct Info {
    Timestamp first;
    Timestamp last;
    bool train = false;
    bool val = false;
    bool test = false;
  };
  std::vector<NodePair> order;
  std::unordered_map<NodePair, Info, NodePairHash> info;
  const auto edges = stream.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    auto [it, inserted] = info.try_emplace(e.pair, Info{e.timestamp, e.timestamp});
    if (inserted) order.push_back(e.pair);
    Info& in = it->second;
    in.last = std::max(in.last, e.timestamp);
    if (i < split.train_end) {
      in.train = true;
    } else if (i < split.val_end) {
      in.val = true;
    } else {
      in.test = true;
    }
  }

  std::vector<TetRow> rows;
  rows.reserve(order.size());
  for (const NodePair& p : order) {
    const Info& in = info.at(p);
    const bool history = in.train || (mode == HistoryMode::train_and_val && in.val);
    TetCategory c;
    if (history) {
      c = in.test ? TetCategory::transductive : TetCategory::train_only;
    } else {
      c = in.test ? TetCategory::inductive : TetCategory::val_only;
    }
    rows.push_back({p, in.first, in.last, c});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const TetRow& a, const TetRow& b) {
    if (a.first_ts != b.first_ts) return a.first_ts < b.first_ts;
    return a.last_ts < b.last_ts;
  });
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_tea_csv(const TeaSeries& series, std::ostream& out) {
  out << "t,repeated,new\n";
  for (const auto& r : series) {
    out << text::format_double(r.t) << ',' << r.repeated << ',' << r.new_count << '\n';
  }
}

inline void write_tet_csv(const std::vector<TetRow>& rows, std::ostream& out) {
  out << "pair_id,source,destination,first_ts,last_ts,category\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << i << ',' << r.pair.source.value << ',' << r.pair.destination.value << ','
        << text::format_double(r.first_ts) << ',' << text::format_double(r.last_ts) << ','
        << to_string(r.category) << '\n';
  }
}

// ---------------------------------------------------------------------------
// SVG

namespace svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double width = 900;
  double height = 480;
  double left = 70;
  double right = 160;
  double top = 40;
  double bottom = 50;

  [[nodiscard]] double plot_w() const { return width - left - right; }
  [[nodiscard]] double plot_h() const { return height - top - bottom; }
};

inline void open(std::ostream& out, const Frame& f, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(f.width)
      << "\" height=\"" << num(f.height) << "\" viewBox=\"0 0 " << num(f.width) << ' '
      << num(f.height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << num(f.width) << "\" height=\"" << num(f.height)
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << num(f.width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
}

inline void axes(std::ostream& out, const Frame& f, const std::string& x_label,
                 const std::string& y_label) {
  const double x0 = f.left, y0 = f.top + f.plot_h();
  out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(f.top) << "\" x2=\"" << num(x0)
      << "\" y2=\"" << num(y0) << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0 + f.plot_w())
      << "\" y2=\"" << num(y0) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << num(x0 + f.plot_w() / 2) << "\" y=\"" << num(f.height - 12)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << num(f.top + f.plot_h() / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << num(f.top + f.plot_h() / 2)
      << ")\">" << escape(y_label) << "</text>\n";
}

inline void tick(std::ostream& out, double x, double y, const std::string& label, bool vertical) {
  if (vertical) {
    out << "<text x=\"" << num(x) << "\" y=\"" << num(y + 16) << "\" text-anchor=\"middle\">"
        << escape(label) << "</text>\n";
  } else {
    out << "<text x=\"" << num(x - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << escape(label) << "</text>\n";
  }
}

inline void legend(std::ostream& out, const Frame& f,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = f.top + 8;
  const double x = f.left + f.plot_w() + 16;
  for (const auto& [label, color] : entries) {
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"12\" fill=\""
        << color << "\"/>\n"
        << "<text x=\"" << num(x + 18) << "\" y=\"" << num(y + 1) << "\">" << escape(label)
        << "</text>\n";
    y += 20;
  }
}

inline std::string compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace svg

inline constexpr const char* kRepeatedColor = "#8c8c8c";
inline constexpr const char* kNewColor = "#d62728";

inline const char* category_color(TetCategory c) {
  switch (c) {
    case TetCategory::train_only: return "#2ca02c";
    case TetCategory::transductive: return "#ff7f0e";
    case TetCategory::inductive: return "#d62728";
    case TetCategory::val_only: return "#1f77b4";
  }
  return "black";
}

/// Stacked bars per (binned) timestamp: repeated pairs below, new above.
inline std::string render_tea_svg(const TeaSeries& series, std::size_t bins = 50,
                                  const std::string& title = "Temporal edge appearance") {
  if (series.empty()) throw Error("render_tea_svg: empty series");
  const auto binned = bin_tea(series, bins);
  std::size_t peak = 0;
  for (const auto& b : binned) peak = std::max(peak, b.repeated + b.new_count);

  const svg::Frame f;
  std::ostringstream out;
  svg::open(out, f, title + " (novelty " + svg::compact(tea_novelty(series)) + ")");
  svg::axes(out, f, "timestamp", "distinct edges");

  const double slot = f.plot_w() / static_cast<double>(binned.size());
  const double bar = std::max(slot * 0.8, 0.5);
  const double base = f.top + f.plot_h();
  const double scale = f.plot_h() / static_cast<double>(peak);
  out << "<g stroke=\"none\">\n";
  for (std::size_t i = 0; i < binned.size(); ++i) {
    const auto& b = binned[i];
    const double x = f.left + slot * static_cast<double>(i) + (slot - bar) / 2;
    const double h_rep = static_cast<double>(b.repeated) * scale;
    const double h_new = static_cast<double>(b.new_count) * scale;
    out << "<rect x=\"" << svg::num(x) << "\" y=\"" << svg::num(base - h_rep) << "\" width=\""
        << svg::num(bar) << "\" height=\"" << svg::num(h_rep) << "\" fill=\"" << kRepeatedColor
        << "\"/>\n"
        << "<rect x=\"" << svg::num(x) << "\" y=\"" << svg::num(base - h_rep - h_new)
        << "\" width=\"" << svg::num(bar) << "\" height=\"" << svg::num(h_new) << "\" fill=\""
        << kNewColor << "\"/>\n";
  }
  out << "</g>\n";
  svg::tick(out, f.left, base, svg::compact(binned.front().t_begin), true);
  svg::tick(out, f.left + f.plot_w(), base, svg::compact(binned.back().t_end), true);
  svg::tick(out, f.left, f.top, std::to_string(peak), false);
  svg::tick(out, f.left, base, "0", false);
  svg::legend(out, f, {{"repeated", kRepeatedColor}, {"new", kNewColor}});
  out << "</svg>\n";
  return out.str();
}

/// One lifespan bar per pair in row order, with a marker at `t_split`.
inline std::string render_tet_svg(const std::vector<TetRow>& rows, Timestamp t_split,
                                  const std::string& title = "Temporal edge traffic") {
  if (rows.empty()) throw Error("render_tet_svg: no rows");
  Timestamp lo = rows.front().first_ts;
  Timestamp hi = t_split;
  for (const auto& r : rows) {
    lo = std::min(lo, r.first_ts);
    hi = std::max(hi, r.last_ts);
  }
  lo = std::min(lo, t_split);
  const double span = hi > lo ? hi - lo : 1.0;

  svg::Frame f;
  f.height = 640;
  std::ostringstream out;
  svg::open(out, f, title);
  svg::axes(out, f, "timestamp", "edge (sorted by first, last appearance)");

  const double row_h = f.plot_h() / static_cast<double>(rows.size());
  const double stroke = std::max(row_h, 0.25);
  auto x_of = [&](Timestamp t) { return f.left + (t - lo) / span * f.plot_w(); };
  out << "<g stroke-width=\"" << svg::num(stroke) << "\">\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double y = f.top + row_h * (static_cast<double>(i) + 0.5);
    double x1 = x_of(r.first_ts);
    double x2 = std::max(x_of(r.last_ts), x1 + 1.0);
    out << "<line x1=\"" << svg::num(x1) << "\" y1=\"" << svg::num(y) << "\" x2=\""
        << svg::num(x2) << "\" y2=\"" << svg::num(y) << "\" stroke=\"" << category_color(r.category)
        << "\"/>\n";
  }
  out << "</g>\n";
  const double xs = x_of(t_split);
  out << "<line x1=\"" << svg::num(xs) << "\" y1=\"" << svg::num(f.top) << "\" x2=\""
      << svg::num(xs) << "\" y2=\"" << svg::num(f.top + f.plot_h())
      << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n"
      << "<text x=\"" << svg::num(xs) << "\" y=\"" << svg::num(f.top - 4)
      << "\" text-anchor=\"middle\" font-weight=\"bold\">x</text>\n";
  const double base = f.top + f.plot_h();
  svg::tick(out, f.left, base, svg::compact(lo), true);
  svg::tick(out, f.left + f.plot_w(), base, svg::compact(hi), true);

  std::vector<std::pair<std::string, std::string>> entries = {
      {"train only", category_color(TetCategory::train_only)},
      {"transductive", category_color(TetCategory::transductive)},
      {"inductive", category_color(TetCategory::inductive)}};
  if (std::any_of(rows.begin(), rows.end(),
                  [](const TetRow& r) { return r.category == TetCategory::val_only; })) {
    entries.emplace_back("validation only", category_color(TetCategory::val_only));
  }
  svg::legend(out, f, entries);
  out << "</svg>\n";
  return out.str();
}

}  // namespace tlp
