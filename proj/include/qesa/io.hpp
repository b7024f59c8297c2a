#ifndef QESA_IO_HPP
#define QESA_IO_HPP

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "annealer.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "samples.hpp"

namespace qesa::io {

using json = nlohmann::ordered_json;

inline constexpr const char *tool_version = "0.1.0";

// ---------------------------------------------------------------------------
// files

inline std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw invalid_input("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw invalid_input("cannot write '" + path + "'");
  out << text;
}

inline json parse_json(const std::string &text, const std::string &what) {
  try {
    return json::parse(text);
  } catch (const json::exception &e) {
    throw invalid_input(what + ": " + e.what());
  }
}

inline json read_json(const std::string &path) { return parse_json(read_text(path), path); }

inline void write_json(const std::string &path, const json &j) { write_text(path, j.dump(2) + "\n"); }

template <class T> T field(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key))
    throw invalid_input(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw invalid_input(std::string("bad field '") + key + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// graph

inline json to_json(const graph &g) {
  json j;
  j["kind"] = std::string(to_string(g.kind()));
  j["n"] = g.size();
  json pos = json::array();
  for (const auto &p : g.positions())
    pos.push_back({p.x, p.y});
  j["positions"] = pos;
  json edges = json::array();
  for (const auto &[a, b] : g.edges())
    edges.push_back({a, b});
  j["edges"] = edges;
  j["blockade_radius"] = g.blockade_radius() ? json(*g.blockade_radius()) : json(nullptr);
  j["seed"] = g.seed() ? json(*g.seed()) : json(nullptr);
  return j;
}

inline graph graph_from_json(const json &j) {
  const auto kind = graph_kind_from_string(field<std::string>(j, "kind"));
  const auto n = field<std::size_t>(j, "n");
  std::vector<point> pos;
  for (const auto &p : field<json>(j, "positions")) {
    require(p.is_array() && p.size() == 2, "positions must be [x, y] pairs");
    pos.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  std::vector<edge> edges;
  for (const auto &e : field<json>(j, "edges")) {
    require(e.is_array() && e.size() == 2, "edges must be [i, j] pairs");
    edges.emplace_back(e[0].get<vertex>(), e[1].get<vertex>());
  }
  std::optional<double> radius;
  if (j.contains("blockade_radius") && !j["blockade_radius"].is_null())
    radius = j["blockade_radius"].get<double>();
  std::optional<std::uint64_t> seed;
  if (j.contains("seed") && !j["seed"].is_null())
    seed = j["seed"].get<std::uint64_t>();
  require(n >= 1, "empty graph");
  return make_graph(n, std::move(edges), std::move(pos), kind, radius, seed);
}

inline graph load_graph(const std::string &path) {
  try {
    return graph_from_json(read_json(path));
  } catch (const json::exception &e) {
    throw invalid_input(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// sample sets (also the ingestion format for external shot data)

inline json to_json(const sample_set &s) {
  json j;
  j["n"] = s.n;
  j["shots"] = s.shots;
  j["bit_order"] = "v0-leftmost";
  json counts = json::object();
  for (const auto &[bits, c] : s.counts)
    counts[bits] = c;
  j["counts"] = counts;
  return j;
}

inline sample_set sample_set_from_json(const json &j) {
  sample_set s;
  s.n = field<std::size_t>(j, "n");
  s.shots = field<std::uint64_t>(j, "shots");
  if (j.contains("bit_order"))
    require(j["bit_order"] == "v0-leftmost", "unsupported bit_order (expected v0-leftmost)");
  const auto counts = field<json>(j, "counts");
  require(counts.is_object(), "counts must be an object");
  for (const auto &[bits, c] : counts.items())
    s.counts[bits] = c.get<std::uint64_t>();
  s.validate();
  return s;
}

// Loads shot data and checks it against the graph it claims to describe.
inline sample_set load_samples(const std::string &path, std::size_t expected_n) {
  sample_set s;
  try {
    s = sample_set_from_json(read_json(path));
  } catch (const json::exception &e) {
    throw invalid_input(path + ": " + e.what());
  }
  require(s.n == expected_n, path + ": samples are for n = " + std::to_string(s.n) + " but the graph has n = " +
                                 std::to_string(expected_n));
  return s;
}

// ---------------------------------------------------------------------------
// run records (JSONL)

// Epochs kept when persisting: every epoch up to 100, every 10th after,
// the last one, and every epoch that sets a new running maximum of alpha
// (so first-crossing epochs of any level survive subsampling).
inline std::vector<std::pair<int, double>> subsample_trajectory(const std::vector<std::pair<int, double>> &traj) {
  std::vector<std::pair<int, double>> out;
  double running_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto &[e, a] = traj[i];
    const bool keep = e <= 100 || e % 10 == 0 || i + 1 == traj.size() || a > running_max;
    running_max = std::max(running_max, a);
    if (keep)
      out.push_back(traj[i]);
  }
  return out;
}

inline json to_json(const run_record &r) {
  json j;
  j["graph_id"] = r.graph_id;
  j["init_kind"] = std::string(to_string(r.init));
  j["seed"] = r.seed;
  j["target_alpha"] = r.target_alpha ? json(*r.target_alpha) : json(nullptr);
  j["epochs_to_target"] = r.epochs_to_target ? json(*r.epochs_to_target) : json(nullptr);
  j["initial_hd"] = r.initial_hd_to_mis;
  j["n"] = r.n;
  json traj = json::array();
  for (const auto &[e, a] : subsample_trajectory(r.alpha_trajectory))
    traj.push_back({e, a});
  j["alpha_trajectory"] = traj;
  j["final_config"] = r.final_config.to_bitstring();
  j["seconds_per_epoch"] = r.seconds_per_epoch;
  return j;
}

inline run_record run_record_from_json(const json &j) {
  run_record r;
  r.graph_id = field<std::string>(j, "graph_id");
  r.init = init_kind_from_string(field<std::string>(j, "init_kind"));
  r.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("target_alpha") && !j["target_alpha"].is_null())
    r.target_alpha = j["target_alpha"].get<double>();
  if (j.contains("epochs_to_target") && !j["epochs_to_target"].is_null())
    r.epochs_to_target = j["epochs_to_target"].get<int>();
  r.initial_hd_to_mis = field<std::size_t>(j, "initial_hd");
  r.final_config = spin_configuration::from_bitstring(field<std::string>(j, "final_config"));
  r.n = j.contains("n") ? j["n"].get<std::size_t>() : r.final_config.size();
  for (const auto &p : field<json>(j, "alpha_trajectory")) {
    require(p.is_array() && p.size() == 2, "alpha_trajectory entries must be [epoch, alpha]");
    r.alpha_trajectory.emplace_back(p[0].get<int>(), p[1].get<double>());
  }
  require(!r.alpha_trajectory.empty(), "alpha_trajectory must not be empty");
  if (j.contains("seconds_per_epoch"))
    r.seconds_per_epoch = j["seconds_per_epoch"].get<double>();
  return r;
}

// Writes a provenance header line followed by one record per line.
inline std::string to_jsonl(const json &provenance, const std::vector<run_record> &records) {
  std::string out = json{{"provenance", provenance}}.dump() + "\n";
  for (const auto &r : records)
    out += to_json(r).dump() + "\n";
  return out;
}

inline std::vector<run_record> read_jsonl(const std::string &path) {
  std::istringstream in(read_text(path));
  std::vector<run_record> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const auto j = parse_json(line, path + ":" + std::to_string(lineno));
    if (j.is_object() && j.size() == 1 && j.contains("provenance"))
      continue;
    try {
      out.push_back(run_record_from_json(j));
    } catch (const json::exception &e) {
      throw invalid_input(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ratio points CSV: optional "# ..." comment lines, then the header

inline constexpr const char *ratio_csv_header = "hd_over_n,epoch_ratio,n,source";

inline std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

inline std::string to_csv(const std::vector<analysis::ratio_point> &pts, const std::string &comment = {}) {
  std::string out;
  if (!comment.empty())
    out += "# " + comment + "\n";
  out += std::string(ratio_csv_header) + "\n";
  for (const auto &p : pts)
    out += format_double(p.hd_over_n) + "," + format_double(p.epoch_ratio) + "," + std::to_string(p.n) + "," +
           std::string(analysis::to_string(p.source)) + "\n";
  return out;
}

inline std::vector<analysis::ratio_point> read_ratio_csv(const std::string &path) {
  std::istringstream in(read_text(path));
  std::string line;
  bool header = false;
  std::vector<analysis::ratio_point> out;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    if (!header) {
      require(line == ratio_csv_header, path + ": expected header '" + ratio_csv_header + "'");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');)
      cells.push_back(c);
    require(cells.size() == 4, path + ":" + std::to_string(lineno) + ": expected 4 columns");
    try {
      out.push_back({std::stod(cells[0]), std::stod(cells[1]), std::size_t(std::stoull(cells[2])),
                     analysis::ratio_source_from_string(cells[3])});
    } catch (const std::logic_error &e) {
      throw invalid_input(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  require(header, path + ": missing header");
  return out;
}

} // namespace qesa::io

#endif // QESA_IO_HPP
