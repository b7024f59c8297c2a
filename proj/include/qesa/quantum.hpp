#ifndef QESA_QUANTUM_HPP
#define QESA_QUANTUM_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "rng.hpp"
#include "samples.hpp"

// Units: time in microseconds, frequencies as angular frequencies in rad/us,
// distances in micrometres. mhz(f) converts a quoted 2*pi x f MHz value.
namespace qesa::quantum {

using amplitude = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double mhz(double f) { return two_pi * f; }

inline constexpr std::size_t default_simulator_limit = 22;

inline double c6_from_pair(double u_pair, double r) {
  require(u_pair > 0.0 && r > 0.0, "pair interaction and distance must be positive");
  return u_pair * std::pow(r, 6);
}

enum class interaction_scope { all_pairs, edges_only };

inline interaction_scope interaction_scope_from_string(std::string_view s) {
  if (s == "all_pairs")
    return interaction_scope::all_pairs;
  if (s == "edges_only")
    return interaction_scope::edges_only;
  throw invalid_input("unknown interaction scope '" + std::string(s) + "'");
}

struct atom_register {
  graph atoms;
  double c6 = 0.0; // rad/us * um^6
  interaction_scope scope = interaction_scope::all_pairs;
  std::size_t limit = default_simulator_limit;

  atom_register(graph g, double c6_coeff, interaction_scope s = interaction_scope::all_pairs,
                std::size_t max_atoms = default_simulator_limit)
      : atoms(std::move(g)), c6(c6_coeff), scope(s), limit(max_atoms) {
    require(c6 > 0.0, "C6 must be positive");
    require(atoms.has_positions(), "atom register needs positions");
    if (atoms.size() > limit)
      throw resource_limit("register has " + std::to_string(atoms.size()) + " atoms; simulator limit is " +
                           std::to_string(limit));
  }

  std::size_t size() const { return atoms.size(); }

  // (j, k, C6 / r^6) for every interacting pair in scope
  std::vector<std::tuple<std::size_t, std::size_t, double>> pair_couplings() const {
    std::vector<std::tuple<std::size_t, std::size_t, double>> out;
    const auto &pos = atoms.positions();
    auto coupling = [&](std::size_t j, std::size_t k) { return c6 / std::pow(distance(pos[j], pos[k]), 6); };
    if (scope == interaction_scope::edges_only) {
      for (const auto &[j, k] : atoms.edges())
        out.emplace_back(j, k, coupling(j, k));
    } else {
      for (std::size_t j = 0; j < size(); ++j)
        for (std::size_t k = j + 1; k < size(); ++k)
          out.emplace_back(j, k, coupling(j, k));
    }
    return out;
  }

  double max_coupling() const {
    double m = 0.0;
    for (const auto &[j, k, u] : pair_couplings())
      m = std::max(m, u);
    return m;
  }
};

// Piecewise-linear control waveform on [0, duration].
class waveform {
  std::vector<std::pair<double, double>> points_;

public:
  waveform() = default;
  explicit waveform(std::vector<std::pair<double, double>> pts) : points_(std::move(pts)) {
    require(!points_.empty(), "waveform needs at least one breakpoint");
    for (std::size_t i = 1; i < points_.size(); ++i)
      require(points_[i].first > points_[i - 1].first, "waveform breakpoints must be strictly increasing");
  }

  const std::vector<std::pair<double, double>> &points() const { return points_; }

  double operator()(double t) const {
    if (t <= points_.front().first)
      return points_.front().second;
    if (t >= points_.back().first)
      return points_.back().second;
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double x, const std::pair<double, double> &p) { return x < p.first; });
    const auto &[t1, v1] = *it;
    const auto &[t0, v0] = *(it - 1);
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto &[t, v] : points_)
      m = std::max(m, std::abs(v));
    return m;
  }
};

enum class schedule_kind { aqc, quench, custom };

inline std::string_view to_string(schedule_kind k) {
  switch (k) {
  case schedule_kind::aqc:
    return "aqc";
  case schedule_kind::quench:
    return "qe";
  case schedule_kind::custom:
    return "custom";
  }
  return "custom";
}

struct pulse_schedule {
  double duration = 0.0;
  waveform omega;
  waveform delta;
  schedule_kind kind = schedule_kind::custom;

  void validate() const {
    require(duration > 0.0, "schedule duration must be positive");
    for (const auto *w : {&omega, &delta}) {
      require(!w->points().empty(), "schedule waveform is empty");
      require(w->points().front().first <= 0.0 && w->points().back().first >= duration,
              "waveforms must cover [0, duration]");
    }
    for (const auto &[t, v] : omega.points())
      require(v >= 0.0, "Rabi frequency must be non-negative");
  }

  // union of breakpoints inside (0, duration), plus the endpoints
  std::vector<double> knots() const {
    std::vector<double> k{0.0, duration};
    for (const auto *w : {&omega, &delta})
      for (const auto &[t, v] : w->points())
        if (t > 0.0 && t < duration)
          k.push_back(t);
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
  }
};

inline constexpr double aqc_ramp_time = 0.3; // us

// Trapezoidal Rabi envelope with the detuning swept during the plateau.
inline pulse_schedule aqc_schedule(double duration, double omega_peak = mhz(1.0), double delta_start = mhz(-4.0),
                                   double delta_end = mhz(2.0)) {
  require(duration > 2.0 * aqc_ramp_time, "AQC duration must exceed the two 0.3 us ramps");
  require(omega_peak > 0.0, "peak Rabi frequency must be positive");
  const double r = aqc_ramp_time;
  pulse_schedule s;
  s.duration = duration;
  s.kind = schedule_kind::aqc;
  s.omega = waveform({{0.0, 0.0}, {r, omega_peak}, {duration - r, omega_peak}, {duration, 0.0}});
  s.delta = waveform({{0.0, delta_start}, {r, delta_start}, {duration - r, delta_end}, {duration, delta_end}});
  return s;
}

// Plateau length pi / (2 sqrt(<deg>) Omega) for a resonant quench.
inline double quench_time(const graph &g, double omega) {
  require(omega > 0.0, "Rabi frequency must be positive");
  const double deg = average_degree(g);
  require(deg > 0.0, "quench duration undefined for edgeless graph");
  return std::numbers::pi / (2.0 * std::sqrt(deg) * omega);
}

// Resonant trapezoid: linear rise over rise_fall, plateau of quench_time,
// linear fall. rise_fall is given in nanoseconds.
inline pulse_schedule qe_schedule(const graph &g, double omega = mhz(1.0), double rise_fall_ns = 50.0) {
  require(rise_fall_ns >= 0.0, "rise/fall time must be non-negative");
  const double tq = quench_time(g, omega);
  const double tr = rise_fall_ns * 1e-3;
  pulse_schedule s;
  s.kind = schedule_kind::quench;
  s.duration = tq + 2.0 * tr;
  if (tr > 0.0)
    s.omega = waveform({{0.0, 0.0}, {tr, omega}, {tr + tq, omega}, {s.duration, 0.0}});
  else
    s.omega = waveform({{0.0, omega}, {s.duration, omega}});
  s.delta = waveform({{0.0, 0.0}, {s.duration, 0.0}});
  return s;
}

// State vector over 2^n basis states. Vertex j is bit j of the basis index.
class quantum_state {
  std::vector<amplitude> amps_;
  std::size_t n_ = 0;

public:
  explicit quantum_state(std::size_t n) : amps_(std::size_t{1} << n), n_(n) { amps_[0] = 1.0; }

  static quantum_state basis(std::string_view bits) {
    quantum_state s(bits.size());
    s.amps_[0] = 0.0;
    s.amps_[index_of(bits)] = 1.0;
    return s;
  }

  static std::size_t index_of(std::string_view bits) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
      require(bits[j] == '0' || bits[j] == '1', "bitstring may only contain '0' and '1'");
      if (bits[j] == '1')
        idx |= std::size_t{1} << j;
    }
    return idx;
  }

  static std::string bitstring_of(std::size_t idx, std::size_t n) {
    std::string s(n, '0');
    for (std::size_t j = 0; j < n; ++j)
      if ((idx >> j) & 1)
        s[j] = '1';
    return s;
  }

  std::size_t qubits() const { return n_; }
  std::size_t dimension() const { return amps_.size(); }
  std::vector<amplitude> &amplitudes() { return amps_; }
  const std::vector<amplitude> &amplitudes() const { return amps_; }

  double norm() const {
    double s = 0.0;
    for (const auto &a : amps_)
      s += std::norm(a);
    return std::sqrt(s);
  }

  void normalize() {
    const double k = 1.0 / norm();
    for (auto &a : amps_)
      a *= k;
  }

  double probability(std::string_view bits) const { return std::norm(amps_.at(index_of(bits))); }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i)
      p[i] = std::norm(amps_[i]);
    return p;
  }

  // <n_j>
  double occupation(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if ((i >> j) & 1)
        s += std::norm(amps_[i]);
    return s;
  }
};

// H = sum_j (omega/2) X_j - delta n_j + sum_pairs U_jk n_j n_k.
// The diagonal is kept as two cached vectors (occupation counts and
// interaction energies) so time dependence only rescales them.
class hamiltonian {
  std::vector<std::uint8_t> occupied_;
  std::vector<double> interaction_;
  std::size_t n_ = 0;

public:
  double omega = 0.0;
  double delta = 0.0;

  explicit hamiltonian(const atom_register &reg) : n_(reg.size()) {
    const std::size_t dim = std::size_t{1} << n_;
    occupied_.assign(dim, 0);
    interaction_.assign(dim, 0.0);
    std::vector<std::vector<double>> u(n_, std::vector<double>(n_, 0.0));
    for (const auto &[j, k, c] : reg.pair_couplings()) {
      u[j][k] = c;
      u[k][j] = c;
    }
    // V(b) = V(b without its lowest bit j) + sum of U_jk over the other bits
    for (std::size_t b = 1; b < dim; ++b) {
      const auto j = std::size_t(std::countr_zero(b));
      const std::size_t rest = b & (b - 1);
      double add = 0.0;
      for (std::size_t r = rest; r; r &= r - 1)
        add += u[j][std::size_t(std::countr_zero(r))];
      interaction_[b] = interaction_[rest] + add;
      occupied_[b] = std::uint8_t(occupied_[rest] + 1);
    }
  }

  std::size_t qubits() const { return n_; }
  std::size_t dimension() const { return occupied_.size(); }
  const std::vector<std::uint8_t> &occupation_counts() const { return occupied_; }
  const std::vector<double> &interaction_energies() const { return interaction_; }

  double diagonal(std::size_t b) const { return -delta * double(occupied_[b]) + interaction_[b]; }

  // Off-diagonal element <a|H|b> (nonzero only for single bit flips).
  double off_diagonal(std::size_t a, std::size_t b) const {
    const auto x = a ^ b;
    return (x && !(x & (x - 1))) ? omega / 2.0 : 0.0;
  }

  std::vector<amplitude> apply(const std::vector<amplitude> &psi) const {
    require(psi.size() == dimension(), "state dimension mismatch");
    std::vector<amplitude> out(psi.size());
    for (std::size_t b = 0; b < psi.size(); ++b) {
      amplitude acc = diagonal(b) * psi[b];
      for (std::size_t j = 0; j < n_; ++j)
        acc += (omega / 2.0) * psi[b ^ (std::size_t{1} << j)];
      out[b] = acc;
    }
    return out;
  }

  double expectation(const quantum_state &s) const {
    const auto h = apply(s.amplitudes());
    amplitude acc = 0.0;
    for (std::size_t b = 0; b < h.size(); ++b)
      acc += std::conj(s.amplitudes()[b]) * h[b];
    return acc.real();
  }
};

inline hamiltonian build_hamiltonian(const atom_register &reg, double omega_now, double delta_now) {
  hamiltonian h(reg);
  h.omega = omega_now;
  h.delta = delta_now;
  return h;
}

struct evolve_options {
  double dt_max = 1e-3; // us
  double drift_tolerance = 1e-6;
};

namespace detail {

// plain product, without the inf/nan recovery of operator*
inline amplitude mul(amplitude a, amplitude b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// Accumulates exp(-i (a * n_occ + b * V)) factors so consecutive diagonal
// half-steps are applied in one pass. The interaction factors for recent
// values of b are cached; b repeats exactly within a waveform segment.
struct pending_phase {
  double occ = 0.0;
  double inter = 0.0;
  std::vector<std::pair<double, std::vector<amplitude>>> cache;

  const std::vector<amplitude> &interaction_factors(const hamiltonian &h) {
    for (const auto &[b, f] : cache)
      if (b == inter)
        return f;
    if (cache.size() >= 4)
      cache.erase(cache.begin());
    const auto &v = h.interaction_energies();
    std::vector<amplitude> f(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      f[i] = std::polar(1.0, -inter * v[i]);
    cache.emplace_back(inter, std::move(f));
    return cache.back().second;
  }

  void flush(const hamiltonian &h, std::vector<amplitude> &psi) {
    if (occ == 0.0 && inter == 0.0)
      return;
    const auto &n = h.occupation_counts();
    std::vector<amplitude> occ_factor(h.qubits() + 1);
    for (std::size_t k = 0; k < occ_factor.size(); ++k)
      occ_factor[k] = std::polar(1.0, -occ * double(k));
    if (inter == 0.0) {
      for (std::size_t b = 0; b < psi.size(); ++b)
        psi[b] = mul(psi[b], occ_factor[n[b]]);
    } else {
      const auto &f = interaction_factors(h);
      for (std::size_t b = 0; b < psi.size(); ++b)
        psi[b] = mul(psi[b], mul(occ_factor[n[b]], f[b]));
    }
    occ = inter = 0.0;
  }
};

// exp(-i theta X_j) on every qubit
inline void rotate_all(std::vector<amplitude> &psi, std::size_t n, double theta) {
  if (theta == 0.0)
    return;
  const double c = std::cos(theta), sn = std::sin(theta);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t base = 0; base < psi.size(); base += 2 * bit)
      for (std::size_t b = base; b < base + bit; ++b) {
        const amplitude a0 = psi[b];
        const amplitude a1 = psi[b | bit];
        // -i sin(theta) a = sin(theta) (a.imag, -a.real)
        psi[b] = {c * a0.real() + sn * a1.imag(), c * a0.imag() - sn * a1.real()};
        psi[b | bit] = {c * a1.real() + sn * a0.imag(), c * a1.imag() - sn * a0.real()};
      }
  }
}

} // namespace detail

// Integrates i d|psi>/dt = H(t)|psi>. Each step is a fourth-order
// (triple-jump) composition of a Strang split: diagonal half-step, exact
// single-qubit rotations, diagonal half-step, with controls sampled at the
// substep midpoint. Steps never straddle a waveform breakpoint.
inline quantum_state evolve(const atom_register &reg, const pulse_schedule &schedule, quantum_state psi,
                            const evolve_options &opts = {}) {
  schedule.validate();
  require(opts.dt_max > 0.0, "dt_max must be positive");
  require(psi.qubits() == reg.size(), "state size does not match register");
  require(std::abs(psi.norm() - 1.0) < 1e-8, "initial state must be normalized");

  hamiltonian h(reg);
  const double scale = std::max({schedule.omega.max_abs(), schedule.delta.max_abs(), reg.max_coupling()});
  double h_max = opts.dt_max;
  if (scale > 0.0)
    h_max = std::min(h_max, 1.0 / (50.0 * scale));

  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2);
  const double w0 = -cbrt2 / (2.0 - cbrt2);
  const double weights[3] = {w1, w0, w1};

  auto &amps = psi.amplitudes();
  const auto n = reg.size();
  detail::pending_phase pending;
  std::size_t steps = 0;

  const auto knots = schedule.knots();
  for (std::size_t seg = 0; seg + 1 < knots.size(); ++seg) {
    const double t_begin = knots[seg];
    const double length = knots[seg + 1] - t_begin;
    const auto count = std::max<std::size_t>(1, std::size_t(std::ceil(length / h_max - 1e-12)));
    const double step = length / double(count);
    for (std::size_t k = 0; k < count; ++k) {
      double t = t_begin + double(k) * step;
      for (double w : weights) {
        const double tau = w * step;
        const double mid = t + tau / 2.0;
        const double om = schedule.omega(mid);
        const double de = schedule.delta(mid);
        // diagonal: -delta * n + V over tau / 2
        pending.occ += -de * tau / 2.0;
        pending.inter += tau / 2.0;
        pending.flush(h, amps);
        detail::rotate_all(amps, n, om * tau / 2.0);
        pending.occ += -de * tau / 2.0;
        pending.inter += tau / 2.0;
        t += tau;
      }
      if (++steps % 256 == 0) {
        pending.flush(h, amps);
        const double drift = std::abs(psi.norm() - 1.0);
        if (drift > opts.drift_tolerance)
          throw numerical_error("integrator unstable, reduce dt_max");
      }
    }
  }
  pending.flush(h, amps);
  const double drift = std::abs(psi.norm() - 1.0);
  if (drift > opts.drift_tolerance)
    throw numerical_error("integrator unstable, reduce dt_max");
  psi.normalize();
  return psi;
}

inline sample_set sample(const quantum_state &state, std::uint64_t shots, std::uint64_t seed) {
  require(shots >= 1, "shots must be >= 1");
  const auto p = state.probabilities();
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  require(std::abs(acc - 1.0) < 1e-8, "state must be normalized before sampling");

  rng gen(seed);
  std::vector<std::uint64_t> hits(p.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = gen.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto idx = std::size_t(it - cdf.begin());
    if (idx >= p.size())
      idx = p.size() - 1;
    while (p[idx] == 0.0 && idx > 0) // never report a zero-probability outcome
      --idx;
    ++hits[idx];
  }

  sample_set out;
  out.n = state.qubits();
  out.shots = shots;
  for (std::size_t i = 0; i < hits.size(); ++i)
    if (hits[i])
      out.counts.emplace(quantum_state::bitstring_of(i, out.n), hits[i]);
  return out;
}

} // namespace qesa::quantum

#endif // QESA_QUANTUM_HPP
