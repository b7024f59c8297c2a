#ifndef QESA_MIS_HPP
#define QESA_MIS_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "error.hpp"
#include "graph.hpp"

namespace qesa {

struct mis_certificate {
  std::size_t size = 0;
  spin_configuration witness;
};

struct mis_options {
  std::size_t max_vertices = 150;
  std::uint64_t node_budget = 50'000'000;
};

namespace detail {

class vertex_set {
  std::vector<std::uint64_t> words_;

public:
  vertex_set() = default;
  explicit vertex_set(std::size_t n) : words_((n + 63) / 64, 0) {}

  void insert(std::size_t v) { words_[v >> 6] |= std::uint64_t{1} << (v & 63); }
  void erase(std::size_t v) { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
  bool contains(std::size_t v) const { return (words_[v >> 6] >> (v & 63)) & 1; }

  bool empty() const {
    return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_)
      c += std::size_t(std::popcount(w));
    return c;
  }

  std::size_t count_and(const vertex_set &o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += std::size_t(std::popcount(words_[i] & o.words_[i]));
    return c;
  }

  void subtract(const vertex_set &o) {
    for (std::size_t i = 0; i < words_.size(); ++i)
      words_[i] &= ~o.words_[i];
  }

  // true when every member of *this is also in o
  bool subset_of(const vertex_set &o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i])
        return false;
    return true;
  }

  template <class F> void for_each(F &&f) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      auto w = words_[i];
      while (w) {
        const auto b = std::size_t(std::countr_zero(w));
        f(i * 64 + b);
        w &= w - 1;
      }
    }
  }

  std::size_t first() const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i])
        return i * 64 + std::size_t(std::countr_zero(words_[i]));
    return SIZE_MAX;
  }
};

// Branch and bound: degree-0/1 reductions, greedy clique-cover upper bound,
// branching on a maximum-degree vertex (take it / drop it).
class mis_search {
  std::vector<vertex_set> adj_;
  std::vector<vertex_set> closed_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<std::size_t> chosen_;
  std::vector<std::size_t> best_;

  std::size_t clique_cover_bound(const vertex_set &p) const {
    std::vector<vertex_set> cliques;
    p.for_each([&](std::size_t v) {
      for (auto &c : cliques)
        if (c.subset_of(adj_[v])) {
          c.insert(v);
          return;
        }
      cliques.emplace_back(adj_.size());
      cliques.back().insert(v);
    });
    return cliques.size();
  }

  void recurse(vertex_set p) {
    if (++nodes_ > budget_)
      throw resource_limit("MIS oracle budget exceeded");
    const auto mark = chosen_.size();

    for (bool changed = true; changed;) {
      changed = false;
      p.for_each([&](std::size_t v) {
        if (changed || !p.contains(v))
          return;
        const auto d = p.count_and(adj_[v]);
        if (d <= 1) {
          chosen_.push_back(v);
          p.subtract(closed_[v]);
          changed = true;
        }
      });
    }

    if (p.empty()) {
      if (chosen_.size() > best_.size())
        best_ = chosen_;
      chosen_.resize(mark);
      return;
    }
    if (chosen_.size() + clique_cover_bound(p) <= best_.size()) {
      chosen_.resize(mark);
      return;
    }

    std::size_t pivot = p.first();
    std::size_t pivot_degree = 0;
    p.for_each([&](std::size_t v) {
      const auto d = p.count_and(adj_[v]);
      if (d > pivot_degree) {
        pivot = v;
        pivot_degree = d;
      }
    });

    vertex_set take = p;
    take.subtract(closed_[pivot]);
    chosen_.push_back(pivot);
    recurse(std::move(take));
    chosen_.pop_back();

    p.erase(pivot);
    recurse(std::move(p));
    chosen_.resize(mark);
  }

public:
  mis_search(const graph &g, std::uint64_t budget) : budget_(budget) {
    const auto n = g.size();
    adj_.assign(n, vertex_set(n));
    closed_.assign(n, vertex_set(n));
    for (std::size_t v = 0; v < n; ++v) {
      closed_[v].insert(v);
      for (auto u : g.neighbors(vertex(v))) {
        adj_[v].insert(u);
        closed_[v].insert(u);
      }
    }
  }

  std::vector<std::size_t> solve(const vertex_set &component) {
    best_.clear();
    chosen_.clear();
    recurse(component);
    return best_;
  }
};

inline std::vector<vertex_set> components(const graph &g) {
  const auto n = g.size();
  std::vector<int> label(n, -1);
  std::vector<vertex_set> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0)
      continue;
    out.emplace_back(n);
    std::vector<std::size_t> stack{s};
    label[s] = int(out.size() - 1);
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      out.back().insert(v);
      for (auto u : g.neighbors(vertex(v)))
        if (label[u] < 0) {
          label[u] = label[s];
          stack.push_back(u);
        }
    }
  }
  return out;
}

} // namespace detail

// Exact maximum independent set with one witness. Connected components are
// solved independently; the node budget is shared across them.
inline mis_certificate exact_mis(const graph &g, const mis_options &opts = {}) {
  if (g.size() > opts.max_vertices)
    throw resource_limit("graph has " + std::to_string(g.size()) + " vertices, MIS oracle limit is " +
                         std::to_string(opts.max_vertices));
  require(g.size() >= 1, "empty graph");
  detail::mis_search search(g, opts.node_budget);
  spin_configuration witness(g.size());
  std::size_t size = 0;
  for (const auto &comp : detail::components(g)) {
    for (auto v : search.solve(comp)) {
      witness.set(v, true);
      ++size;
    }
  }
  return {size, std::move(witness)};
}

} // namespace qesa

#endif // QESA_MIS_HPP
