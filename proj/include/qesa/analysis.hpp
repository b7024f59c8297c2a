#ifndef QESA_ANALYSIS_HPP
#define QESA_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "annealer.hpp"
#include "error.hpp"

namespace qesa::analysis {

// ---------------------------------------------------------------------------
// Regression helpers

// 1 - (1 - R^2)(m - 1)/(m - p - 1) for m points and p predictors.
inline double adjusted_r2(double ss_res, double ss_tot, std::size_t m, std::size_t p) {
  double r2;
  if (ss_tot <= 0.0)
    r2 = ss_res <= 0.0 ? 1.0 : 0.0;
  else
    r2 = 1.0 - ss_res / ss_tot;
  if (m <= p + 1)
    return r2;
  return 1.0 - (1.0 - r2) * double(m - 1) / double(m - p - 1);
}

struct line_fit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2_adj = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
inline line_fit fit_line(const std::vector<double> &x, const std::vector<double> &y) {
  const auto m = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(m);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, "degenerate regressor values");
  line_fit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  // round-off in a constant response is not variance
  if (syy <= 1e-24 * (1.0 + my * my) * double(m))
    syy = ss_res = 0.0;
  f.r2_adj = adjusted_r2(ss_res, syy, m, 1);
  return f;
}

inline std::size_t distinct_count(const std::vector<double> &x) { return std::set<double>(x.begin(), x.end()).size(); }

// ---------------------------------------------------------------------------
// Epoch performance ratio y(x) = 1 / (c1 (exp(beta x) - 1)), x = HD/N

inline double epoch_ratio_model(double x, double c1, double beta) {
  if (x == 0.0)
    throw invalid_input("ratio diverges at zero Hamming distance");
  require(x > 0.0, "HD/N must be positive");
  require(c1 > 0.0 && beta > 0.0, "c1 and beta must be positive");
  return 1.0 / (c1 * std::expm1(beta * x));
}

enum class ratio_source { model_pipeline, aqc, qe };

inline std::string_view to_string(ratio_source s) {
  switch (s) {
  case ratio_source::model_pipeline:
    return "model_pipeline";
  case ratio_source::aqc:
    return "aqc";
  case ratio_source::qe:
    return "qe";
  }
  return "model_pipeline";
}

inline ratio_source ratio_source_from_string(std::string_view s) {
  if (s == "model_pipeline")
    return ratio_source::model_pipeline;
  if (s == "aqc")
    return ratio_source::aqc;
  if (s == "qe")
    return ratio_source::qe;
  throw invalid_input("unknown ratio source '" + std::string(s) + "'");
}

struct ratio_point {
  double hd_over_n = 0.0;
  double epoch_ratio = 0.0;
  std::size_t n = 0;
  ratio_source source = ratio_source::model_pipeline;
};

struct ratio_points_result {
  std::vector<ratio_point> points;
  bool empty_warning = false;
};

inline constexpr double default_alpha_levels[] = {0.85, 0.88, 0.91};
inline constexpr double default_alpha_final = 0.95;

// For each level a_i, the cost of a record is epochs(alpha_final) - epochs(a_i),
// where epochs(a) is the first epoch reaching a (0 when the initial state
// already does). Both lists are sorted by initial HD and paired by rank,
// truncated to the shorter list; ratio = SA cost / warm cost. Records that
// never reach a level, and pairs with a zero cost, are dropped.
inline ratio_points_result build_ratio_points(const std::vector<run_record> &sa_records,
                                              const std::vector<run_record> &warm_records,
                                              const std::vector<double> &alpha_levels, double alpha_final,
                                              ratio_source source = ratio_source::model_pipeline) {
  struct cost {
    std::size_t hd;
    std::size_t n;
    int epochs;
  };
  auto costs = [&](const std::vector<run_record> &recs, double level) {
    std::vector<cost> out;
    for (const auto &r : recs) {
      const auto at_level = r.first_epoch_reaching(level);
      const auto at_final = r.first_epoch_reaching(alpha_final);
      if (!at_level || !at_final)
        continue;
      out.push_back({r.initial_hd_to_mis, r.n, *at_final - *at_level});
    }
    std::stable_sort(out.begin(), out.end(), [](const cost &a, const cost &b) { return a.hd < b.hd; });
    return out;
  };

  ratio_points_result res;
  for (double level : alpha_levels) {
    const auto sa = costs(sa_records, level);
    const auto warm = costs(warm_records, level);
    const auto m = std::min(sa.size(), warm.size());
    for (std::size_t i = 0; i < m; ++i) {
      if (warm[i].epochs <= 0 || sa[i].epochs <= 0 || warm[i].n == 0)
        continue;
      res.points.push_back({double(warm[i].hd) / double(warm[i].n), double(sa[i].epochs) / double(warm[i].epochs),
                            warm[i].n, source});
    }
  }
  res.empty_warning = res.points.empty();
  return res;
}

struct epoch_ratio_fit {
  double c1 = 0.0;
  double beta = 0.0;
  double r2_adj = 0.0;
  std::size_t n_points = 0;
};

namespace detail {

// For a fixed c1 the transformed relation ln(1/y + c1) = ln c1 + beta x is
// linear in x with a pinned intercept; beta is its least-squares slope.
// The c1 search scores each candidate by the log-ratio residuals of the
// untransformed model (the transformed residuals alone shrink to zero as
// c1 grows, so they cannot rank c1).
struct profile {
  const std::vector<double> &x;
  const std::vector<double> &y;

  double slope(double c1) const {
    double sxz = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z = std::log1p(c1 * y[i]) - std::log(c1 * y[i]); // ln(1/y + c1) - ln c1
      sxz += x[i] * z;
      sxx += x[i] * x[i];
    }
    return sxz / sxx;
  }

  // (score, beta) for c1 = exp(log_c1)
  std::pair<double, double> operator()(double log_c1) const {
    const double c1 = std::exp(log_c1);
    const double beta = slope(c1);
    if (!(beta > 0.0))
      return {std::numeric_limits<double>::infinity(), beta};
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = std::log(y[i]) + std::log(c1 * std::expm1(beta * x[i]));
      sse += r * r;
    }
    return {sse, beta};
  }
};

} // namespace detail

inline epoch_ratio_fit fit_epoch_ratio(const std::vector<ratio_point> &points) {
  std::vector<double> x, y;
  for (const auto &p : points) {
    require(p.hd_over_n > 0.0 && std::isfinite(p.epoch_ratio) && p.epoch_ratio > 0.0,
            "ratio points need HD/N > 0 and a positive finite ratio");
    x.push_back(p.hd_over_n);
    y.push_back(p.epoch_ratio);
  }
  require(x.size() >= 3, "epoch-ratio fit needs at least 3 points");
  require(distinct_count(x) >= 3, "epoch-ratio fit needs at least 3 distinct HD/N values");

  const detail::profile prof{x, y};
  // coarse scan in ln c1, then golden-section refinement around the best cell
  const double lo = std::log(1e-6), hi = std::log(1e4);
  const int cells = 400;
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= cells; ++i) {
    const double u = lo + (hi - lo) * i / cells;
    const double s = prof(u).first;
    if (s < best_sse) {
      best_sse = s;
      best = i;
    }
  }
  const double h = (hi - lo) / cells;
  double a = lo + h * std::max(best - 1, 0), b = lo + h * std::min(best + 1, cells);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = prof(c).first, fd = prof(d).first;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = prof(c).first;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = prof(d).first;
    }
  }
  const double u = (a + b) / 2.0;

  epoch_ratio_fit f;
  f.c1 = std::exp(u);
  f.beta = prof(u).second;
  f.n_points = x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - 1.0 / (f.c1 * std::expm1(f.beta * x[i]));
    ss_res += r * r;
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  f.r2_adj = adjusted_r2(ss_res, ss_tot, x.size(), 2);
  return f;
}

// ---------------------------------------------------------------------------
// Scaling laws: epochs-to-solution a N b^sqrt(N), per-epoch time c N^d

inline double ets_model(double n, double a, double b) {
  require(n >= 1.0, "n must be >= 1");
  return a * n * std::pow(b, std::sqrt(n));
}

inline double t_step_model(double n, double c, double d) { return c * std::pow(n, d); }

// seconds, with c in seconds
inline double t_processing(double n, double a, double b, double c, double d) {
  require(n >= 1.0, "n must be >= 1");
  return ets_model(n, a, b) * t_step_model(n, c, d);
}

struct ets_fit {
  double a = 0.0;
  double b = 0.0;
  double r2_adj = 0.0;
};

struct t_step_fit {
  double c = 0.0; // seconds
  double d = 0.0;
  double r2_adj = 0.0;
};

inline ets_fit fit_ets(const std::vector<std::pair<double, double>> &series) {
  std::vector<double> x, y;
  for (const auto &[n, epochs] : series) {
    require(n >= 1.0, "graph size must be >= 1");
    require(epochs > 0.0, "epochs must be positive");
    x.push_back(std::sqrt(n));
    y.push_back(std::log(epochs / n));
  }
  require(distinct_count(x) >= 3, "ETS fit needs at least 3 distinct graph sizes");
  const auto f = fit_line(x, y);
  return {std::exp(f.intercept), std::exp(f.slope), f.r2_adj};
}

inline t_step_fit fit_t_step(const std::vector<std::pair<double, double>> &timings) {
  std::vector<double> x, y;
  for (const auto &[n, seconds] : timings) {
    require(n >= 1.0, "graph size must be >= 1");
    require(seconds > 0.0, "per-epoch time must be positive");
    x.push_back(std::log(n));
    y.push_back(std::log(seconds));
  }
  require(distinct_count(x) >= 3, "t_step fit needs at least 3 distinct graph sizes");
  const auto f = fit_line(x, y);
  return {std::exp(f.intercept), f.slope, f.r2_adj};
}

struct scaling_fit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0; // seconds per epoch at N = 1
  double d = 0.0;
  double r2_adj_ets = 0.0;
  double r2_adj_tstep = 0.0;
  std::string label;

  double processing_time(double n) const { return t_processing(n, a, b, c, d); }
};

// Largest integer n with processing time <= budget.
inline std::uint64_t extrapolate_nc(double budget_seconds, const scaling_fit &fit) {
  require(fit.a > 0.0 && fit.b > 0.0 && fit.c > 0.0, "scaling parameters a, b, c must be positive");
  require(fit.b >= 1.0 && fit.d >= 0.0, "processing time must be non-decreasing in n (b >= 1, d >= 0)");
  if (!(budget_seconds >= fit.processing_time(1.0)))
    throw invalid_input("budget is below the processing time of a single-vertex graph");
  std::uint64_t lo = 1, hi = 2;
  while (fit.processing_time(double(hi)) <= budget_seconds) {
    lo = hi;
    require(hi < (std::uint64_t{1} << 52), "budget too large to extrapolate");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const auto mid = lo + (hi - lo) / 2;
    if (fit.processing_time(double(mid)) <= budget_seconds)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// Fraction of pairs (qesa, sa) with qesa > sa; ties count one half.
inline double advantage_fraction(const std::vector<std::pair<double, double>> &pairs) {
  require(!pairs.empty(), "advantage fraction of an empty set");
  double wins = 0.0;
  for (const auto &[q, s] : pairs)
    wins += q > s ? 1.0 : (q == s ? 0.5 : 0.0);
  return wins / double(pairs.size());
}

// Average ranks (ties share the mean rank).
inline std::vector<double> ranks(const std::vector<double> &v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
      ++j;
    const double mean_rank = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      r[idx[k]] = mean_rank;
    i = j + 1;
  }
  return r;
}

inline double pearson(const std::vector<double> &x, const std::vector<double> &y) {
  require(x.size() == y.size() && x.size() >= 2, "correlation needs two equal-length series");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0 && syy > 0.0, "correlation of a constant series");
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double> &x, const std::vector<double> &y) {
  return pearson(ranks(x), ranks(y));
}

inline double median(std::vector<double> v) {
  require(!v.empty(), "median of an empty set");
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

} // namespace qesa::analysis

#endif // QESA_ANALYSIS_HPP
