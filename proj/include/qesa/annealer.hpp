#ifndef QESA_ANNEALER_HPP
#define QESA_ANNEALER_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "mis.hpp"
#include "rng.hpp"
#include "samples.hpp"

namespace qesa {

// Cost Hamiltonian weights: -delta per occupied vertex, +u per violated edge.
struct energy_params {
  double delta = 1.0;
  double u = 11.0;

  void validate() const { require(delta > 0.0 && delta < u, "energy parameters need 0 < delta < u"); }
};

inline double mis_energy(const graph &g, const spin_configuration &s, const energy_params &p) {
  check_length(g, s);
  return -p.delta * double(s.popcount()) + p.u * double(violating_edges(g, s));
}

enum class cooling_kind { geometric, linear };

struct cooling_schedule {
  double t_initial = 2.0;
  double t_final = 0.03;
  cooling_kind kind = cooling_kind::geometric;
  int epochs_max = 1000;

  void validate() const {
    require(t_initial > 0.0 && t_final > 0.0, "temperatures must be positive");
    require(t_final <= t_initial, "final temperature must not exceed the initial temperature");
    require(epochs_max >= 1, "epochs_max must be >= 1");
  }

  // Temperature used during epoch e (1-based). Epoch 1 runs at t_initial,
  // epoch epochs_max at t_final.
  double temperature(int e) const {
    if (epochs_max == 1 || e >= epochs_max)
      return t_final;
    if (e <= 1)
      return t_initial;
    const double f = double(e - 1) / double(epochs_max - 1);
    if (kind == cooling_kind::linear)
      return t_initial + (t_final - t_initial) * f;
    return t_initial * std::pow(t_final / t_initial, f);
  }
};

inline std::string_view to_string(cooling_kind k) { return k == cooling_kind::linear ? "linear" : "geometric"; }

inline cooling_kind cooling_kind_from_string(std::string_view s) {
  if (s == "geometric")
    return cooling_kind::geometric;
  if (s == "linear")
    return cooling_kind::linear;
  throw invalid_input("unknown cooling schedule '" + std::string(s) + "'");
}

struct proposal {
  enum kind_t { none, add, swap, remove };
  kind_t kind = none;
  vertex site = 0;
  vertex partner = 0; // swap target

  // Bits that change if the proposal is accepted (a swap between two equal
  // occupations changes nothing).
  std::vector<vertex> flipped_bits(const spin_configuration &s) const {
    switch (kind) {
    case add:
    case remove:
      return {site};
    case swap:
      if (s[site] != s[partner])
        return {site, partner};
      return {};
    case none:
      break;
    }
    return {};
  }
};

inline constexpr double swap_probability = 1.0 / 8.0;

// Three-rule kernel. Free vertex -> add. Occupied vertex -> each neighbour in
// ascending order gets a 1/8 chance to swap, first success wins, otherwise
// remove. Unoccupied vertex with an occupied neighbour -> no proposal.
inline proposal propose_update(const graph &g, const spin_configuration &s, vertex v, rng &gen) {
  require(v < g.size(), "vertex out of range");
  const auto &nb = g.neighbors(v);
  if (s[v] == 0) {
    for (auto u : nb)
      if (s[u])
        return {proposal::none, v, 0};
    return {proposal::add, v, 0};
  }
  for (auto u : nb)
    if (gen.bernoulli(swap_probability))
      return {proposal::swap, v, u};
  return {proposal::remove, v, 0};
}

inline bool metropolis_accept(double delta_e, double temperature, rng &gen) {
  require(temperature > 0.0, "temperature must be positive");
  if (delta_e <= 0.0)
    return true;
  return gen.uniform() < std::exp(-delta_e / temperature);
}

// Change in (occupied count, violated edge count) if the bits in `flips` are toggled.
struct occupation_delta {
  long occupied = 0;
  long violations = 0;

  double energy(const energy_params &p) const { return -p.delta * double(occupied) + p.u * double(violations); }
};

inline occupation_delta flip_delta(const graph &g, const spin_configuration &s, const std::vector<vertex> &flips) {
  occupation_delta d;
  auto after = [&](vertex x) {
    std::uint8_t b = s[x];
    for (auto f : flips)
      if (f == x)
        b ^= 1;
    return b;
  };
  for (auto v : flips) {
    d.occupied += s[v] ? -1 : 1;
    for (auto u : g.neighbors(v)) {
      // count each affected edge once: skip when the other endpoint is an
      // earlier flipped bit
      bool counted = false;
      for (auto f : flips) {
        if (f == v)
          break;
        if (f == u)
          counted = true;
      }
      if (counted)
        continue;
      d.violations += long(after(v) & after(u)) - long(s[v] & s[u]);
    }
  }
  return d;
}

enum class init_kind { random_matched, warm_start_aqc, warm_start_qe, explicit_init };

inline std::string_view to_string(init_kind k) {
  switch (k) {
  case init_kind::random_matched:
    return "random_matched";
  case init_kind::warm_start_aqc:
    return "warm_start_aqc";
  case init_kind::warm_start_qe:
    return "warm_start_qe";
  case init_kind::explicit_init:
    return "explicit";
  }
  return "explicit";
}

inline init_kind init_kind_from_string(std::string_view s) {
  if (s == "random_matched")
    return init_kind::random_matched;
  if (s == "warm_start_aqc")
    return init_kind::warm_start_aqc;
  if (s == "warm_start_qe")
    return init_kind::warm_start_qe;
  if (s == "explicit")
    return init_kind::explicit_init;
  throw invalid_input("unknown init kind '" + std::string(s) + "'");
}

struct run_record {
  std::string graph_id;
  init_kind init = init_kind::explicit_init;
  std::uint64_t seed = 0;
  std::optional<double> target_alpha;
  std::optional<int> epochs_to_target;
  std::vector<std::pair<int, double>> alpha_trajectory; // (epoch, alpha); epoch 0 is the initial state
  spin_configuration final_config;
  std::size_t initial_hd_to_mis = 0;
  std::size_t n = 0;
  double seconds_per_epoch = 0.0; // wall clock, excluded from determinism checks

  // First epoch whose alpha reaches `level`, if any.
  std::optional<int> first_epoch_reaching(double level) const {
    for (const auto &[e, a] : alpha_trajectory)
      if (a >= level)
        return e;
    return std::nullopt;
  }

  // Alpha at the last recorded epoch <= e (trajectories may be subsampled
  // or stop early at the target).
  double alpha_at(int e) const {
    double a = alpha_trajectory.front().second;
    for (const auto &[ep, al] : alpha_trajectory) {
      if (ep > e)
        break;
      a = al;
    }
    return a;
  }
};

// One epoch = n proposal attempts at uniformly drawn vertices. Energy and
// alpha are tracked incrementally; the run stops at epochs_max or at the
// first epoch with alpha >= target.
inline run_record anneal(const graph &g, spin_configuration init, const cooling_schedule &schedule,
                         const energy_params &params, std::optional<double> target_alpha, const mis_certificate &mis,
                         std::uint64_t seed) {
  check_length(g, init);
  schedule.validate();
  params.validate();
  require(mis.size >= 1 && mis.witness.size() == g.size(), "MIS certificate does not belong to this graph");

  const auto t0 = std::chrono::steady_clock::now();
  run_record rec;
  rec.seed = seed;
  rec.target_alpha = target_alpha;
  rec.n = g.size();
  rec.initial_hd_to_mis = hamming_distance(init, mis.witness);

  rng gen(seed);
  spin_configuration s = std::move(init);
  long occupied = long(s.popcount());
  long violations = long(violating_edges(g, s));
  const double denom = double(mis.size);
  auto alpha = [&] { return double(occupied - violations) / denom; };

  rec.alpha_trajectory.emplace_back(0, alpha());
  auto reached = [&](int e) {
    if (target_alpha && alpha() >= *target_alpha) {
      rec.epochs_to_target = e;
      return true;
    }
    return false;
  };

  int epochs_run = 0;
  if (!reached(0)) {
    const auto n = g.size();
    for (int e = 1; e <= schedule.epochs_max; ++e) {
      const double temp = schedule.temperature(e);
      for (std::size_t k = 0; k < n; ++k) {
        const auto v = vertex(gen.below(n));
        const auto p = propose_update(g, s, v, gen);
        if (p.kind == proposal::none)
          continue;
        const auto flips = p.flipped_bits(s);
        if (flips.empty())
          continue;
        const auto d = flip_delta(g, s, flips);
        if (metropolis_accept(d.energy(params), temp, gen)) {
          for (auto f : flips)
            s.set(f, !s[f]);
          occupied += d.occupied;
          violations += d.violations;
        }
      }
      epochs_run = e;
      rec.alpha_trajectory.emplace_back(e, alpha());
      if (reached(e))
        break;
    }
  }

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  rec.seconds_per_epoch = epochs_run > 0 ? elapsed.count() / epochs_run : 0.0;
  rec.final_config = std::move(s);
  return rec;
}

inline spin_configuration random_init_matched_occupation(std::size_t n, std::size_t n_occupied, std::uint64_t seed) {
  require(n_occupied <= n, "cannot occupy " + std::to_string(n_occupied) + " of " + std::to_string(n) + " vertices");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i)
    idx[i] = i;
  rng gen(seed);
  spin_configuration s(n);
  for (std::size_t i = 0; i < n_occupied; ++i) {
    std::swap(idx[i], idx[i + gen.below(n - i)]);
    s.set(idx[i], true);
  }
  return s;
}

enum class warm_start_policy { best_alpha, modal, per_shot };

inline warm_start_policy warm_start_policy_from_string(std::string_view s) {
  if (s == "best_alpha")
    return warm_start_policy::best_alpha;
  if (s == "modal")
    return warm_start_policy::modal;
  if (s == "per_shot")
    return warm_start_policy::per_shot;
  throw invalid_input("unknown warm-start policy '" + std::string(s) + "'");
}

// best_alpha and modal return one configuration (ties -> lowest bitstring);
// per_shot returns every shot, expanded by count, in bitstring order.
inline std::vector<spin_configuration> select_warm_start(const sample_set &samples, const graph &g,
                                                         std::size_t mis_size, warm_start_policy policy) {
  require(!samples.counts.empty() && samples.shots > 0, "empty sample set");
  require(samples.n == g.size(), "sample set size does not match graph");
  samples.validate();

  std::vector<spin_configuration> out;
  switch (policy) {
  case warm_start_policy::best_alpha: {
    const std::string *best = nullptr;
    double best_alpha = 0.0;
    for (const auto &[bits, c] : samples.counts) {
      const double a = approximation_ratio(g, spin_configuration::from_bitstring(bits), mis_size);
      if (!best || a > best_alpha) {
        best = &bits;
        best_alpha = a;
      }
    }
    out.push_back(spin_configuration::from_bitstring(*best));
    break;
  }
  case warm_start_policy::modal: {
    const std::string *best = nullptr;
    std::uint64_t best_count = 0;
    for (const auto &[bits, c] : samples.counts)
      if (c > best_count) {
        best = &bits;
        best_count = c;
      }
    out.push_back(spin_configuration::from_bitstring(*best));
    break;
  }
  case warm_start_policy::per_shot:
    for (const auto &[bits, c] : samples.counts)
      for (std::uint64_t k = 0; k < c; ++k)
        out.push_back(spin_configuration::from_bitstring(bits));
    break;
  }
  return out;
}

} // namespace qesa

#endif // QESA_ANNEALER_HPP
