#ifndef QESA_GRAPH_HPP
#define QESA_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace qesa {

using vertex = std::uint32_t;
using edge = std::pair<vertex, vertex>;

struct point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const point &, const point &) = default;
};

inline double distance(const point &a, const point &b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class graph_kind { kings, unit_disk, explicit_edges };

inline std::string_view to_string(graph_kind k) {
  switch (k) {
  case graph_kind::kings:
    return "kings";
  case graph_kind::unit_disk:
    return "unit_disk";
  case graph_kind::explicit_edges:
    return "explicit";
  }
  return "explicit";
}

inline graph_kind graph_kind_from_string(std::string_view s) {
  if (s == "kings")
    return graph_kind::kings;
  if (s == "unit_disk")
    return graph_kind::unit_disk;
  if (s == "explicit")
    return graph_kind::explicit_edges;
  throw invalid_input("unknown graph kind '" + std::string(s) + "'");
}

// Immutable simple undirected graph with optional embedding.
// Edges are canonical: i < j, sorted lexicographically, no duplicates.
class graph {
  std::vector<point> positions_;
  std::vector<edge> edges_;
  std::vector<std::vector<vertex>> adjacency_;
  std::optional<double> blockade_radius_;
  std::optional<std::uint64_t> seed_;
  graph_kind kind_ = graph_kind::explicit_edges;
  std::size_t n_ = 0;

  graph() = default;

  friend graph make_graph(std::size_t, std::vector<edge>, std::vector<point>, graph_kind, std::optional<double>,
                          std::optional<std::uint64_t>);

public:
  std::size_t size() const noexcept { return n_; }
  const std::vector<point> &positions() const noexcept { return positions_; }
  const std::vector<edge> &edges() const noexcept { return edges_; }
  const std::vector<vertex> &neighbors(vertex v) const { return adjacency_.at(v); }
  std::size_t degree(vertex v) const { return adjacency_.at(v).size(); }
  std::optional<double> blockade_radius() const noexcept { return blockade_radius_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  graph_kind kind() const noexcept { return kind_; }
  bool has_positions() const noexcept { return !positions_.empty(); }

  bool adjacent(vertex a, vertex b) const {
    const auto &nb = adjacency_.at(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }
};

// Validating constructor shared by every generator and by the JSON loader.
inline graph make_graph(std::size_t n, std::vector<edge> edges, std::vector<point> positions = {},
                        graph_kind kind = graph_kind::explicit_edges, std::optional<double> blockade_radius = {},
                        std::optional<std::uint64_t> seed = {}) {
  require(positions.empty() || positions.size() == n, "positions must be empty or have one entry per vertex");
  if (kind != graph_kind::explicit_edges) {
    require(positions.size() == n, "geometric graphs need positions");
    require(blockade_radius.has_value() && *blockade_radius > 0.0, "geometric graphs need a positive blockade radius");
  }
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      require(!(positions[i] == positions[j]),
              "duplicate positions for vertices " + std::to_string(i) + " and " + std::to_string(j));

  for (auto &e : edges) {
    require(e.first < n && e.second < n, "edge index out of range");
    require(e.first != e.second, "self-loop on vertex " + std::to_string(e.first));
    if (e.first > e.second)
      std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  require(std::adjacent_find(edges.begin(), edges.end()) == edges.end(), "duplicate edge");

  if (kind != graph_kind::explicit_edges) {
    const double r = *blockade_radius;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool inside = distance(positions[i], positions[j]) <= r;
        const bool listed = k < edges.size() && edges[k] == edge{vertex(i), vertex(j)};
        require(inside == listed, "edge set disagrees with blockade radius at pair (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
        k += listed;
      }
  }

  graph g;
  g.n_ = n;
  g.positions_ = std::move(positions);
  g.edges_ = std::move(edges);
  g.kind_ = kind;
  g.blockade_radius_ = blockade_radius;
  g.seed_ = seed;
  g.adjacency_.assign(n, {});
  for (const auto &[a, b] : g.edges_) {
    g.adjacency_[a].push_back(b);
    g.adjacency_[b].push_back(a);
  }
  for (auto &nb : g.adjacency_)
    std::sort(nb.begin(), nb.end());
  return g;
}

namespace detail {
inline std::vector<edge> threshold_edges(const std::vector<point> &pos, double radius) {
  std::vector<edge> out;
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i + 1; j < pos.size(); ++j)
      if (distance(pos[i], pos[j]) <= radius)
        out.emplace_back(vertex(i), vertex(j));
  return out;
}
} // namespace detail

inline graph build_unit_disk_edges(std::vector<point> positions, double radius) {
  require(radius > 0.0, "radius must be positive");
  require(!positions.empty(), "empty graph");
  auto edges = detail::threshold_edges(positions, radius);
  const auto n = positions.size();
  return make_graph(n, std::move(edges), std::move(positions), graph_kind::unit_disk, radius);
}

// Blockade radius used for King's lattices: diagonal neighbours inside,
// distance-2 sites outside, with a 1% guard against rounding at the boundary.
inline double kings_radius(double spacing) { return spacing * std::sqrt(2.0) * 1.01; }

// Square lattice, row-major site order, diluted to ceil(fill * rows * cols)
// uniformly chosen sites.
inline graph generate_kings_graph(int rows, int cols, double fill_fraction, double spacing, std::uint64_t seed) {
  require(rows >= 1 && cols >= 1, "rows and cols must be >= 1");
  require(spacing > 0.0, "lattice spacing must be positive");
  require(fill_fraction <= 1.0, "fill fraction must be in (0, 1]");
  const std::size_t sites = std::size_t(rows) * std::size_t(cols);
  const double target = fill_fraction > 0.0 ? std::ceil(fill_fraction * double(sites) - 1e-9) : 0.0;
  const auto keep = static_cast<std::size_t>(std::max(0.0, target));
  if (keep == 0)
    throw invalid_input("empty graph");

  std::vector<std::size_t> order(sites);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (keep < sites) {
    rng gen(seed);
    for (std::size_t i = 0; i < keep; ++i)
      std::swap(order[i], order[i + gen.below(sites - i)]);
    order.resize(keep);
    std::sort(order.begin(), order.end());
  }

  std::vector<point> pos;
  pos.reserve(keep);
  for (auto s : order)
    pos.push_back({double(s % std::size_t(cols)) * spacing, double(s / std::size_t(cols)) * spacing});
  const double r = kings_radius(spacing);
  auto edges = detail::threshold_edges(pos, r);
  return make_graph(keep, std::move(edges), std::move(pos), graph_kind::kings, r, seed);
}

// Occupation vector n_j in {0,1}; independence is not required.
class spin_configuration {
  std::vector<std::uint8_t> bits_;

public:
  spin_configuration() = default;
  explicit spin_configuration(std::size_t n) : bits_(n, 0) {}
  explicit spin_configuration(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      require(b <= 1, "spin configuration values must be 0 or 1");
  }

  // vertex 0 is the leftmost character
  static spin_configuration from_bitstring(std::string_view s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
      require(c == '0' || c == '1', "bitstring may only contain '0' and '1'");
      bits.push_back(std::uint8_t(c - '0'));
    }
    return spin_configuration(std::move(bits));
  }

  std::string to_bitstring() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
      s[i] = char('0' + bits_[i]);
    return s;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool v) { bits_.at(i) = v ? 1 : 0; }
  const std::vector<std::uint8_t> &bits() const noexcept { return bits_; }

  std::size_t popcount() const { return std::size_t(std::count(bits_.begin(), bits_.end(), std::uint8_t{1})); }

  friend bool operator==(const spin_configuration &, const spin_configuration &) = default;
  friend auto operator<=>(const spin_configuration &, const spin_configuration &) = default;
};

inline void check_length(const graph &g, const spin_configuration &s) {
  require(s.size() == g.size(), "configuration length " + std::to_string(s.size()) + " does not match graph size " +
                                    std::to_string(g.size()));
}

// Edges with both endpoints occupied.
inline std::size_t violating_edges(const graph &g, const spin_configuration &s) {
  check_length(g, s);
  std::size_t count = 0;
  for (const auto &[a, b] : g.edges())
    count += (s[a] & s[b]);
  return count;
}

inline bool is_independent(const graph &g, const spin_configuration &s) { return violating_edges(g, s) == 0; }

// (occupied - violated edges) / |MIS|. Signed; not clamped.
inline double approximation_ratio(const graph &g, const spin_configuration &s, std::size_t mis_size) {
  require(mis_size >= 1, "MIS size must be >= 1");
  const auto occupied = static_cast<double>(s.popcount());
  return (occupied - static_cast<double>(violating_edges(g, s))) / static_cast<double>(mis_size);
}

inline std::size_t hamming_distance(const spin_configuration &s, const spin_configuration &t) {
  require(s.size() == t.size(), "hamming distance needs equal lengths");
  std::size_t d = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    d += s[i] != t[i];
  return d;
}

inline double average_degree(const graph &g) {
  require(g.size() >= 1, "average degree of an empty graph");
  return 2.0 * double(g.edges().size()) / double(g.size());
}

} // namespace qesa

#endif // QESA_GRAPH_HPP
