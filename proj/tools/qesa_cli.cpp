#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <qesa/io.hpp>
#include <qesa/qesa.hpp>

namespace fs = std::filesystem;
using qesa::io::json;

namespace {

// ---------------------------------------------------------------------------
// plumbing shared by every command

std::string output_path(const std::string &flag, const std::string &fallback) {
  if (!flag.empty())
    return flag;
  const char *dir = std::getenv("QESA_OUTPUT_DIR");
  if (dir && *dir) {
    fs::create_directories(dir);
    return (fs::path(dir) / fallback).string();
  }
  return fallback;
}

json provenance(const CLI::App &sub, const std::string &command, const std::string &config_path) {
  json args = json::object();
  for (const CLI::Option *o : sub.get_options()) {
    if (o->get_lnames().empty() || o->get_lnames().front() == "help")
      continue;
    const auto &name = o->get_lnames().front();
    if (o->get_expected_max() == 0) {
      args[name] = o->count() > 0;
    } else if (o->count() > 0) {
      const auto &res = o->results();
      if (res.size() == 1 || o->get_expected_max() == 1)
        args[name] = res.back();
      else
        args[name] = res;
    } else if (!o->get_default_str().empty()) {
      args[name] = o->get_default_str();
    } else {
      args[name] = nullptr;
    }
  }
  json p;
  p["tool"] = "qesa";
  p["version"] = qesa::io::tool_version;
  p["command"] = command;
  p["config"] = config_path.empty() ? json(nullptr) : json(config_path);
  p["args"] = args;
  return p;
}

// A JSON config is a flat object of flag names (without dashes) to values.
// Its entries are appended after the command line, so they take precedence.
std::vector<std::string> config_args(const std::string &path) {
  const auto j = qesa::io::read_json(path);
  qesa::require(j.is_object(), path + ": config must be a JSON object");
  std::vector<std::string> out;
  auto scalar = [&](const json &v, const std::string &key) -> std::string {
    if (v.is_string())
      return v.get<std::string>();
    if (v.is_number())
      return v.dump();
    throw qesa::invalid_input(path + ": unsupported value for '" + key + "'");
  };
  for (const auto &[key, v] : j.items()) {
    const std::string flag = "--" + (key == "master_seed" ? std::string("seed") : key);
    if (key == "target" && v.is_number())
      qesa::require(v.get<double>() > 0.0 && v.get<double>() <= 1.0, path + ": target must be in (0, 1]");
    if (v.is_boolean()) {
      if (v.get<bool>())
        out.push_back(flag);
    } else if (v.is_array()) {
      out.push_back(flag);
      for (const auto &e : v)
        out.push_back(scalar(e, key));
    } else if (!v.is_null()) {
      out.push_back(flag);
      out.push_back(scalar(v, key));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// gen-graph

struct gen_graph_opts {
  std::string kind = "kings";
  int rows = 4, cols = 4;
  double fill = 1.0, spacing = 6.0;
  std::uint64_t seed = 0;
  std::string positions;
  double radius = 0.0;
  std::string out;
};

void cmd_gen_graph(const gen_graph_opts &o, const json &prov) {
  std::optional<qesa::graph> g;
  if (o.kind == "kings") {
    g = qesa::generate_kings_graph(o.rows, o.cols, o.fill, o.spacing, o.seed);
  } else if (o.kind == "unit_disk") {
    qesa::require(!o.positions.empty(), "unit_disk graphs need --positions");
    qesa::require(o.radius > 0.0, "unit_disk graphs need --radius > 0");
    std::vector<qesa::point> pos;
    for (const auto &p : qesa::io::read_json(o.positions)) {
      qesa::require(p.is_array() && p.size() == 2, "positions must be [x, y] pairs");
      pos.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    g = qesa::build_unit_disk_edges(std::move(pos), o.radius);
  } else {
    throw qesa::invalid_input("unknown graph kind '" + o.kind + "'");
  }
  auto j = qesa::io::to_json(*g);
  j["provenance"] = prov;
  const auto path = output_path(o.out, "graph.json");
  qesa::io::write_json(path, j);
  std::cout << "wrote " << path << " (n = " << g->size() << ", edges = " << g->edges().size() << ")\n";
}

// ---------------------------------------------------------------------------
// quantum

struct quantum_opts {
  std::string graph, mode, scope = "all_pairs", out;
  std::uint64_t shots = 1000, seed = 0;
  std::optional<double> duration, u_pair, u_distance, c6;
  double omega = 1.0, delta_start = -4.0, delta_end = 2.0, rise_fall_ns = 50.0;
  double dt_max = 1e-3;
  std::size_t max_atoms = qesa::quantum::default_simulator_limit;
};

void cmd_quantum(const quantum_opts &o, const json &prov) {
  namespace q = qesa::quantum;
  const auto g = qesa::io::load_graph(o.graph);
  qesa::require(o.mode == "aqc" || o.mode == "qe", "--mode must be aqc or qe");
  if (g.size() > o.max_atoms)
    throw qesa::resource_limit("graph has " + std::to_string(g.size()) + " vertices; simulator limit is " +
                               std::to_string(o.max_atoms));

  // pair interaction defaults differ by protocol: (U/2pi MHz, r um)
  double c6;
  if (o.c6) {
    qesa::require(!o.u_pair && !o.u_distance, "--c6 excludes --u-pair/--u-distance");
    c6 = *o.c6;
  } else {
    const double u = o.u_pair.value_or(o.mode == "qe" ? 4.8 : 2.7);
    const double r = o.u_distance.value_or(o.mode == "qe" ? 7.5 : 8.5);
    c6 = q::c6_from_pair(q::mhz(u), r);
  }

  q::pulse_schedule sched;
  if (o.mode == "aqc") {
    sched = q::aqc_schedule(o.duration.value_or(4.0), q::mhz(o.omega), q::mhz(o.delta_start), q::mhz(o.delta_end));
  } else {
    qesa::require(!o.duration, "--duration applies to aqc mode only (qe length follows from the graph)");
    sched = q::qe_schedule(g, q::mhz(o.omega), o.rise_fall_ns);
  }

  const q::atom_register reg(g, c6, q::interaction_scope_from_string(o.scope), o.max_atoms);
  q::evolve_options eo;
  eo.dt_max = o.dt_max;
  const auto psi = q::evolve(reg, sched, q::quantum_state(g.size()), eo);
  const auto samples = q::sample(psi, o.shots, o.seed);

  auto j = qesa::io::to_json(samples);
  j["mode"] = o.mode;
  j["duration_us"] = sched.duration;
  j["c6"] = c6;
  j["provenance"] = prov;
  const auto path = output_path(o.out, "samples.json");
  qesa::io::write_json(path, j);

  std::string modal;
  std::uint64_t best = 0;
  for (const auto &[bits, c] : samples.counts)
    if (c > best) {
      best = c;
      modal = bits;
    }
  std::cout << "wrote " << path << " (" << o.mode << ", " << sched.duration << " us, modal " << modal << " x" << best
            << ")\n";
}

// ---------------------------------------------------------------------------
// anneal

struct anneal_opts {
  std::string graph, warm_start, policy = "best_alpha", warm_kind, init, graph_id, schedule = "geometric", out;
  bool random_matched = false;
  std::optional<std::size_t> occupied;
  std::size_t runs = 1;
  unsigned parallel = 1;
  std::optional<double> target;
  std::uint64_t seed = 0;
  double t_initial = 2.0, t_final = 0.03, delta = 1.0, u = 11.0;
  int epochs_max = 1000;
};

template <class F> void parallel_for(std::size_t count, unsigned workers, F &&f) {
  workers = std::max(1u, std::min<unsigned>(workers, unsigned(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i)
      f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure)
            failure = std::current_exception();
        }
      }
    });
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

void cmd_anneal(const anneal_opts &o, const json &prov) {
  const auto g = qesa::io::load_graph(o.graph);
  qesa::require(o.runs >= 1, "--runs must be >= 1");
  if (o.target)
    qesa::require(*o.target > 0.0 && *o.target <= 1.0, "--target must be in (0, 1]");
  const auto mis = qesa::exact_mis(g);

  qesa::cooling_schedule sched{o.t_initial, o.t_final, qesa::cooling_kind_from_string(o.schedule), o.epochs_max};
  const qesa::energy_params params{o.delta, o.u};

  std::vector<qesa::spin_configuration> seeds_cfg;
  qesa::init_kind warm_kind = qesa::init_kind::warm_start_qe;
  if (!o.warm_start.empty()) {
    const auto raw = qesa::io::read_json(o.warm_start);
    const auto samples = qesa::io::load_samples(o.warm_start, g.size());
    std::string kind = o.warm_kind;
    if (kind.empty())
      kind = raw.contains("mode") && raw["mode"].is_string() ? raw["mode"].get<std::string>() : "qe";
    qesa::require(kind == "qe" || kind == "aqc", "warm-start kind must be qe or aqc");
    warm_kind = kind == "aqc" ? qesa::init_kind::warm_start_aqc : qesa::init_kind::warm_start_qe;
    seeds_cfg = qesa::select_warm_start(samples, g, mis.size, qesa::warm_start_policy_from_string(o.policy));
  }
  if (!o.init.empty()) {
    qesa::require(o.warm_start.empty() && !o.random_matched, "--init excludes --warm-start and --random-matched");
    seeds_cfg = {qesa::spin_configuration::from_bitstring(o.init)};
    qesa::check_length(g, seeds_cfg.front());
  }
  if (o.random_matched) {
    qesa::require(!o.warm_start.empty() || o.occupied,
                  "--random-matched needs an occupation count or --warm-start samples to match");
    qesa::require(o.warm_start.empty() || !o.occupied, "--random-matched takes no count when --warm-start is given");
  } else {
    qesa::require(!seeds_cfg.empty(), "choose an initialization: --warm-start, --random-matched K or --init");
  }

  std::vector<qesa::run_record> records(o.runs);
  parallel_for(o.runs, o.parallel, [&](std::size_t r) {
    const auto run_seed = qesa::derive_seed(o.seed, r);
    qesa::spin_configuration init;
    qesa::init_kind kind;
    if (o.random_matched) {
      const auto k = o.occupied ? *o.occupied : seeds_cfg[r % seeds_cfg.size()].popcount();
      init = qesa::random_init_matched_occupation(g.size(), k, qesa::derive_seed(run_seed, 0));
      kind = qesa::init_kind::random_matched;
    } else {
      init = seeds_cfg[r % seeds_cfg.size()];
      kind = o.init.empty() ? warm_kind : qesa::init_kind::explicit_init;
    }
    auto rec = qesa::anneal(g, std::move(init), sched, params, o.target, mis, run_seed);
    rec.graph_id = o.graph_id.empty() ? fs::path(o.graph).stem().string() : o.graph_id;
    rec.init = kind;
    records[r] = std::move(rec);
  });

  const auto path = output_path(o.out, "runs.jsonl");
  qesa::io::write_text(path, qesa::io::to_jsonl(prov, records));
  std::size_t hit = 0;
  for (const auto &r : records)
    hit += r.epochs_to_target.has_value();
  std::cout << "wrote " << path << " (" << records.size() << " runs, |MIS| = " << mis.size;
  if (o.target)
    std::cout << ", " << hit << " reached " << *o.target;
  std::cout << ")\n";
}

// ---------------------------------------------------------------------------
// analyze

std::vector<qesa::run_record> load_records(const std::vector<std::string> &paths) {
  std::vector<qesa::run_record> out;
  for (const auto &p : paths) {
    auto recs = qesa::io::read_jsonl(p);
    qesa::require(!recs.empty(), p + ": no run records");
    out.insert(out.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  return out;
}

std::map<std::string, std::vector<qesa::run_record>> by_graph(const std::vector<qesa::run_record> &recs) {
  std::map<std::string, std::vector<qesa::run_record>> out;
  for (const auto &r : recs)
    out[r.graph_id].push_back(r);
  return out;
}

std::string sibling(const std::string &path, const std::string &suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

struct ratio_opts {
  std::vector<std::string> sa, warm;
  std::vector<double> levels{std::begin(qesa::analysis::default_alpha_levels),
                             std::end(qesa::analysis::default_alpha_levels)};
  double final_alpha = qesa::analysis::default_alpha_final;
  std::string source, out;
};

void cmd_ratio_points(const ratio_opts &o, const json &prov) {
  namespace an = qesa::analysis;
  const auto sa = by_graph(load_records(o.sa));
  const auto warm = by_graph(load_records(o.warm));
  std::optional<an::ratio_source> src;
  if (!o.source.empty())
    src = an::ratio_source_from_string(o.source);

  // records are paired within each graph
  std::vector<an::ratio_point> pts;
  for (const auto &[id, w] : warm) {
    const auto it = sa.find(id);
    if (it == sa.end())
      continue;
    auto s = src;
    if (!s) {
      const auto k = w.front().init;
      s = k == qesa::init_kind::warm_start_aqc  ? an::ratio_source::aqc
          : k == qesa::init_kind::warm_start_qe ? an::ratio_source::qe
                                                : an::ratio_source::model_pipeline;
    }
    auto res = an::build_ratio_points(it->second, w, o.levels, o.final_alpha, *s);
    pts.insert(pts.end(), res.points.begin(), res.points.end());
  }
  if (pts.empty())
    std::cerr << "warning: no ratio points (no pair reached both the level and the final alpha)\n";
  const auto path = output_path(o.out, "ratio_points.csv");
  qesa::io::write_text(path, qesa::io::to_csv(pts, "provenance: " + prov.dump()));
  std::cout << "wrote " << path << " (" << pts.size() << " points)\n";
}

void cmd_fit_eq4(const std::string &points, const std::string &out, const std::string &residuals, const json &prov) {
  namespace an = qesa::analysis;
  const auto pts = qesa::io::read_ratio_csv(points);
  qesa::require(!pts.empty(), points + ": no ratio points");
  const auto f = an::fit_epoch_ratio(pts);

  const auto path = output_path(out, "fit_eq4.json");
  const auto res_path = residuals.empty() ? sibling(path, "_residuals.csv") : residuals;
  std::string csv = "# provenance: " + prov.dump() + "\nhd_over_n,epoch_ratio,fitted,residual\n";
  for (const auto &p : pts) {
    const double m = an::epoch_ratio_model(p.hd_over_n, f.c1, f.beta);
    csv += qesa::io::format_double(p.hd_over_n) + "," + qesa::io::format_double(p.epoch_ratio) + "," +
           qesa::io::format_double(m) + "," + qesa::io::format_double(p.epoch_ratio - m) + "\n";
  }
  qesa::io::write_text(res_path, csv);

  json j;
  j["model"] = "eq4";
  j["params"] = {{"c1", f.c1}, {"beta", f.beta}};
  j["r2_adj"] = f.r2_adj;
  j["n_points"] = f.n_points;
  j["residuals_file"] = res_path;
  j["provenance"] = prov;
  qesa::io::write_json(path, j);
  std::cout << "c1 = " << f.c1 << ", beta = " << f.beta << ", R2_adj = " << f.r2_adj << " (" << f.n_points
            << " points)\nwrote " << path << "\n";
}

// Per graph size: mean epochs to target over runs that reached it, median
// seconds per epoch over all runs.
void cmd_fit_scaling(const std::vector<std::string> &inputs, const std::string &out, const json &prov) {
  namespace an = qesa::analysis;
  std::map<std::size_t, std::vector<double>> epochs, timing;
  std::size_t missed = 0;
  for (const auto &r : load_records(inputs)) {
    if (r.seconds_per_epoch > 0.0)
      timing[r.n].push_back(r.seconds_per_epoch);
    if (r.epochs_to_target)
      epochs[r.n].push_back(double(std::max(*r.epochs_to_target, 1)));
    else
      ++missed;
  }
  if (missed)
    std::cerr << "warning: " << missed << " runs never reached their target and are excluded from the ETS fit\n";
  std::vector<std::pair<double, double>> ets, ts;
  for (const auto &[n, e] : epochs)
    ets.emplace_back(double(n), std::accumulate(e.begin(), e.end(), 0.0) / double(e.size()));
  for (const auto &[n, t] : timing)
    ts.emplace_back(double(n), an::median(t));
  const auto fe = an::fit_ets(ets);
  const auto ft = an::fit_t_step(ts);

  const auto path = output_path(out, "fit_scaling.json");
  const auto res_path = sibling(path, "_residuals.csv");
  std::string csv = "# provenance: " + prov.dump() + "\nmodel,n,observed,fitted,residual\n";
  for (const auto &[n, e] : ets) {
    const double m = an::ets_model(n, fe.a, fe.b);
    csv += "eq5," + qesa::io::format_double(n) + "," + qesa::io::format_double(e) + "," + qesa::io::format_double(m) +
           "," + qesa::io::format_double(e - m) + "\n";
  }
  for (const auto &[n, t] : ts) {
    const double m = an::t_step_model(n, ft.c, ft.d);
    csv += "eq6," + qesa::io::format_double(n) + "," + qesa::io::format_double(t) + "," + qesa::io::format_double(m) +
           "," + qesa::io::format_double(t - m) + "\n";
  }
  qesa::io::write_text(res_path, csv);

  json fits = json::array();
  fits.push_back({{"model", "eq5"},
                  {"params", {{"a", fe.a}, {"b", fe.b}}},
                  {"r2_adj", fe.r2_adj},
                  {"n_points", ets.size()},
                  {"residuals_file", res_path}});
  fits.push_back({{"model", "eq6"},
                  {"params", {{"c_us", ft.c * 1e6}, {"d", ft.d}}},
                  {"r2_adj", ft.r2_adj},
                  {"n_points", ts.size()},
                  {"residuals_file", res_path}});
  json j;
  j["fits"] = fits;
  // directly usable as an extrapolate params file
  j["a0"] = fe.a;
  j["b"] = fe.b;
  j["c_us"] = ft.c * 1e6;
  j["d"] = ft.d;
  j["series"] = json::array({{{"label", "fitted"}, {"ratio", 1.0}}});
  j["provenance"] = prov;
  qesa::io::write_json(path, j);
  std::cout << "a = " << fe.a << ", b = " << fe.b << ", c = " << ft.c * 1e6 << " us, d = " << ft.d << "\nwrote "
            << path << "\n";
}

// Params file: {"a0", "b", "c_us", "d", "series": [{"label", "ratio", "a_fitted"?}]}.
// Each series uses a = a0 / ratio; a listed a_fitted is evaluated as well
// and the gap between the two is reported.
void cmd_extrapolate(const std::string &params, double budget, const std::string &out, const json &prov) {
  namespace an = qesa::analysis;
  const auto p = qesa::io::read_json(params);
  const auto a0 = qesa::io::field<double>(p, "a0");
  const auto b = qesa::io::field<double>(p, "b");
  const auto c = qesa::io::field<double>(p, "c_us") * 1e-6;
  const auto d = qesa::io::field<double>(p, "d");
  json series = p.contains("series") ? p["series"] : json::array({{{"label", "base"}, {"ratio", 1.0}}});
  qesa::require(series.is_array() && !series.empty(), params + ": series must be a non-empty array");

  json rows = json::array();
  for (const auto &s : series) {
    const auto label = qesa::io::field<std::string>(s, "label");
    const auto ratio = qesa::io::field<double>(s, "ratio");
    qesa::require(ratio > 0.0, params + ": ratio must be positive");
    an::scaling_fit f;
    f.a = a0 / ratio;
    f.b = b;
    f.c = c;
    f.d = d;
    f.label = label;
    json row;
    row["label"] = label;
    row["ratio"] = ratio;
    row["a"] = f.a;
    row["n_c"] = an::extrapolate_nc(budget, f);
    std::cout << label << ": a = " << f.a << ", N_c = " << row["n_c"].get<std::uint64_t>();
    if (s.contains("a_fitted") && !s["a_fitted"].is_null()) {
      auto g = f;
      g.a = s["a_fitted"].get<double>();
      row["a_fitted"] = g.a;
      row["n_c_a_fitted"] = an::extrapolate_nc(budget, g);
      row["a_relative_gap"] = (g.a - f.a) / f.a;
      std::cout << " (a_fitted = " << g.a << ", N_c = " << row["n_c_a_fitted"].get<std::uint64_t>() << ")";
    }
    std::cout << "\n";
    rows.push_back(row);
  }
  json j;
  j["budget_seconds"] = budget;
  j["series"] = rows;
  j["provenance"] = prov;
  const auto path = output_path(out, "extrapolate.json");
  qesa::io::write_json(path, j);
  std::cout << "wrote " << path << "\n";
}

// Pairs the i-th QESA run with the i-th SA run of the same graph and
// compares alpha at epoch round(x * n).
void cmd_advantage(const std::vector<std::string> &qesa_files, const std::vector<std::string> &sa_files, double x,
                   const std::string &out, const json &prov) {
  namespace an = qesa::analysis;
  qesa::require(x >= 0.0, "--epoch-over-n must be >= 0");
  const auto q = by_graph(load_records(qesa_files));
  const auto s = by_graph(load_records(sa_files));
  std::vector<std::pair<double, double>> pairs;
  std::string csv = "# provenance: " + prov.dump() + "\ngraph_id,n,epoch,alpha_qesa,alpha_sa\n";
  for (const auto &[id, qr] : q) {
    const auto it = s.find(id);
    if (it == s.end())
      continue;
    const auto m = std::min(qr.size(), it->second.size());
    for (std::size_t i = 0; i < m; ++i) {
      const int e = int(std::lround(x * double(qr[i].n)));
      const double aq = qr[i].alpha_at(e), as = it->second[i].alpha_at(e);
      pairs.emplace_back(aq, as);
      csv += id + "," + std::to_string(qr[i].n) + "," + std::to_string(e) + "," + qesa::io::format_double(aq) + "," +
             qesa::io::format_double(as) + "\n";
    }
  }
  qesa::require(!pairs.empty(), "no QESA/SA run pairs share a graph_id");
  const double frac = an::advantage_fraction(pairs);
  const auto path = output_path(out, "advantage.json");
  const auto pairs_path = sibling(path, "_pairs.csv");
  qesa::io::write_text(pairs_path, csv);
  json j;
  j["epoch_over_n"] = x;
  j["pairs"] = pairs.size();
  j["advantage_fraction"] = frac;
  j["pairs_file"] = pairs_path;
  j["provenance"] = prov;
  qesa::io::write_json(path, j);
  std::cout << "advantage fraction " << frac << " over " << pairs.size() << " pairs\nwrote " << path << "\n";
}

} // namespace

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i] == "--config" || args[i].rfind("--config=", 0) == 0) {
      const bool inline_value = args[i] != "--config";
      if (!inline_value && i + 1 >= args.size()) {
        std::cerr << "error: --config needs a file\n";
        return 2;
      }
      config_path = inline_value ? args[i].substr(9) : args[i + 1];
      args.erase(args.begin() + long(i), args.begin() + long(i) + (inline_value ? 1 : 2));
      break;
    }

  try {
    if (!config_path.empty()) {
      const auto extra = config_args(config_path);
      args.insert(args.end(), extra.begin(), extra.end());
    }

    CLI::App app{"qesa: quantum-enhanced simulated annealing for maximum independent set"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", std::string(qesa::io::tool_version));
    std::string unused_config;
    app.add_option("--config", unused_config, "JSON file of flag values that override the command line");

    gen_graph_opts gg;
    auto *gen = app.add_subcommand("gen-graph", "generate a King's or unit-disk graph");
    gen->add_option("--kind", gg.kind, "kings | unit_disk")->capture_default_str();
    gen->add_option("--rows", gg.rows)->capture_default_str();
    gen->add_option("--cols", gg.cols)->capture_default_str();
    gen->add_option("--fill", gg.fill, "fraction of lattice sites kept")->capture_default_str();
    gen->add_option("--spacing", gg.spacing, "lattice spacing (um)")->capture_default_str();
    gen->add_option("--seed", gg.seed)->capture_default_str();
    gen->add_option("--positions", gg.positions, "JSON file of [x, y] pairs (unit_disk)");
    gen->add_option("--radius", gg.radius, "blockade radius (unit_disk)");
    gen->add_option("--out", gg.out);

    quantum_opts qo;
    auto *qu = app.add_subcommand("quantum", "simulate an AQC or QE run and sample bitstrings");
    qu->add_option("--graph", qo.graph)->required();
    qu->add_option("--mode", qo.mode, "aqc | qe")->required();
    qu->add_option("--shots", qo.shots)->capture_default_str();
    qu->add_option("--seed", qo.seed)->capture_default_str();
    qu->add_option("--duration", qo.duration, "AQC sweep length (us), default 4");
    qu->add_option("--omega", qo.omega, "peak Rabi frequency / 2pi (MHz)")->capture_default_str();
    qu->add_option("--delta-start", qo.delta_start, "AQC detuning start / 2pi (MHz)")->capture_default_str();
    qu->add_option("--delta-end", qo.delta_end, "AQC detuning end / 2pi (MHz)")->capture_default_str();
    qu->add_option("--rise-fall-ns", qo.rise_fall_ns, "QE ramp time (ns)")->capture_default_str();
    qu->add_option("--u-pair", qo.u_pair, "pair interaction / 2pi (MHz) at --u-distance");
    qu->add_option("--u-distance", qo.u_distance, "distance (um) for --u-pair");
    qu->add_option("--c6", qo.c6, "C6 coefficient (rad/us um^6)");
    qu->add_option("--scope", qo.scope, "all_pairs | edges_only")->capture_default_str();
    qu->add_option("--dt-max", qo.dt_max, "integrator step bound (us)")->capture_default_str();
    qu->add_option("--max-atoms", qo.max_atoms)->capture_default_str();
    qu->add_option("--out", qo.out);

    anneal_opts ao;
    auto *an = app.add_subcommand("anneal", "run simulated annealing batches");
    an->add_option("--graph", ao.graph)->required();
    an->add_option("--warm-start", ao.warm_start, "samples JSON used for initialization");
    an->add_option("--policy", ao.policy, "best_alpha | modal | per_shot")->capture_default_str();
    an->add_option("--warm-kind", ao.warm_kind, "aqc | qe (default: the samples' mode)");
    an->add_flag("--random-matched", ao.random_matched, "random starts with matched occupation");
    an->add_option("--occupied", ao.occupied, "occupation count for --random-matched without --warm-start");
    an->add_option("--init", ao.init, "explicit initial bitstring");
    an->add_option("--runs", ao.runs)->capture_default_str();
    an->add_option("--target", ao.target, "stop at this alpha");
    an->add_option("--seed", ao.seed)->capture_default_str();
    an->add_option("--t-initial", ao.t_initial)->capture_default_str();
    an->add_option("--t-final", ao.t_final)->capture_default_str();
    an->add_option("--epochs-max", ao.epochs_max)->capture_default_str();
    an->add_option("--schedule", ao.schedule, "geometric | linear")->capture_default_str();
    an->add_option("--delta", ao.delta, "reward per occupied vertex")->capture_default_str();
    an->add_option("--u", ao.u, "penalty per violated edge")->capture_default_str();
    an->add_option("--parallel", ao.parallel, "worker threads")->capture_default_str();
    an->add_option("--graph-id", ao.graph_id, "default: graph file stem");
    an->add_option("--out", ao.out);

    auto *az = app.add_subcommand("analyze", "fit and summarize run records");
    az->require_subcommand(1);
    ratio_opts ro;
    auto *rp = az->add_subcommand("ratio-points", "epoch ratios between random-start and warm-start runs");
    rp->add_option("--sa", ro.sa, "random-start run records (JSONL)")->required();
    rp->add_option("--warm", ro.warm, "warm-start run records (JSONL)")->required();
    rp->add_option("--levels", ro.levels)->delimiter(',')->capture_default_str();
    rp->add_option("--final", ro.final_alpha)->capture_default_str();
    rp->add_option("--source", ro.source, "model_pipeline | aqc | qe (default: from init kind)");
    rp->add_option("--out", ro.out);

    std::string fit_points, fit_out, fit_residuals;
    auto *f4 = az->add_subcommand("fit-eq4", "fit the epoch-ratio model to ratio points");
    f4->add_option("--points", fit_points)->required();
    f4->add_option("--out", fit_out);
    f4->add_option("--residuals", fit_residuals);

    std::vector<std::string> scaling_runs;
    std::string scaling_out;
    auto *fs_ = az->add_subcommand("fit-scaling", "fit epochs-to-solution and per-epoch time against n");
    fs_->add_option("--runs", scaling_runs, "run records over several graph sizes")->required();
    fs_->add_option("--out", scaling_out);

    std::string ex_params, ex_out;
    double budget = 86400.0;
    auto *ex = az->add_subcommand("extrapolate", "largest n whose processing time fits a budget");
    ex->add_option("--params", ex_params)->required();
    ex->add_option("--budget-seconds", budget)->capture_default_str();
    ex->add_option("--out", ex_out);

    std::vector<std::string> adv_q, adv_s;
    double adv_x = 0.5;
    std::string adv_out;
    auto *ad = az->add_subcommand("advantage-fraction", "share of paired runs where QESA leads at a fixed epoch");
    ad->add_option("--qesa", adv_q)->required();
    ad->add_option("--sa", adv_s)->required();
    ad->add_option("--epoch-over-n", adv_x)->capture_default_str();
    ad->add_option("--out", adv_out);

    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError &e) {
      const int rc = app.exit(e);
      return rc == 0 ? 0 : 2;
    }

    if (*gen)
      cmd_gen_graph(gg, provenance(*gen, "gen-graph", config_path));
    else if (*qu)
      cmd_quantum(qo, provenance(*qu, "quantum", config_path));
    else if (*an)
      cmd_anneal(ao, provenance(*an, "anneal", config_path));
    else if (*rp)
      cmd_ratio_points(ro, provenance(*rp, "analyze ratio-points", config_path));
    else if (*f4)
      cmd_fit_eq4(fit_points, fit_out, fit_residuals, provenance(*f4, "analyze fit-eq4", config_path));
    else if (*fs_)
      cmd_fit_scaling(scaling_runs, scaling_out, provenance(*fs_, "analyze fit-scaling", config_path));
    else if (*ex)
      cmd_extrapolate(ex_params, budget, ex_out, provenance(*ex, "analyze extrapolate", config_path));
    else if (*ad)
      cmd_advantage(adv_q, adv_s, adv_x, adv_out, provenance(*ad, "analyze advantage-fraction", config_path));
    return 0;
  } catch (const qesa::invalid_input &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qesa::resource_limit &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
