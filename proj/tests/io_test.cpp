#include <cstdio>
#include <filesystem>

#include <gtest/gtest.h>

#include <qesa/io.hpp>
#include <qesa/mis.hpp>

using namespace qesa;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string &name) { return fs::temp_directory_path() / ("qesa_io_test_" + name); }

} // namespace

TEST(GraphJson, RoundTripPreservesEverything) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = generate_kings_graph(4, 5, 0.7, 5.3, seed);
    const auto text = io::to_json(g).dump();
    const auto h = io::graph_from_json(io::json::parse(text));
    EXPECT_EQ(h.positions(), g.positions());
    EXPECT_EQ(h.edges(), g.edges());
    EXPECT_EQ(h.kind(), g.kind());
    EXPECT_EQ(h.blockade_radius(), g.blockade_radius());
    EXPECT_EQ(h.seed(), g.seed());
    EXPECT_EQ(io::to_json(h).dump(), text);
  }
}

TEST(GraphJson, SchemaAndValidation) {
  const auto j = io::to_json(make_graph(3, {{2, 0}, {1, 0}}, {{0, 0}, {1, 0}, {0, 1}}));
  EXPECT_EQ(j["kind"], "explicit");
  EXPECT_EQ(j["edges"].dump(), "[[0,1],[0,2]]");
  EXPECT_TRUE(j["blockade_radius"].is_null());
  EXPECT_TRUE(j["seed"].is_null());

  auto bad = j;
  bad["edges"].push_back({0, 7});
  EXPECT_THROW(io::graph_from_json(bad), invalid_input);
  auto missing = j;
  missing.erase("n");
  EXPECT_THROW(io::graph_from_json(missing), invalid_input);
  auto lying = io::to_json(generate_kings_graph(2, 2, 1.0, 6.0, 0));
  lying["edges"].erase(0);
  EXPECT_THROW(io::graph_from_json(lying), invalid_input);
}

TEST(SampleSetJson, RoundTripAndIngestValidation) {
  sample_set s{3, 10, {{"101", 6}, {"010", 4}}};
  const auto j = io::to_json(s);
  EXPECT_EQ(j["bit_order"], "v0-leftmost");
  const auto back = io::sample_set_from_json(j);
  EXPECT_EQ(back.counts, s.counts);

  auto short_key = j;
  short_key["counts"]["11"] = 1;
  short_key["shots"] = 11;
  EXPECT_THROW(io::sample_set_from_json(short_key), invalid_input);
  auto wrong_total = j;
  wrong_total["shots"] = 9;
  EXPECT_THROW(io::sample_set_from_json(wrong_total), invalid_input);
  auto other_order = j;
  other_order["bit_order"] = "v0-rightmost";
  EXPECT_THROW(io::sample_set_from_json(other_order), invalid_input);

  const auto path = temp_file("samples.json");
  io::write_json(path.string(), j);
  EXPECT_NO_THROW(io::load_samples(path.string(), 3));
  EXPECT_THROW(io::load_samples(path.string(), 4), invalid_input);
  fs::remove(path);
}

TEST(RunRecordJson, SubsamplingKeepsFirstCrossings) {
  run_record r;
  r.graph_id = "g";
  r.n = 4;
  r.final_config = spin_configuration::from_bitstring("1010");
  rng gen(4);
  double a = 0.0;
  for (int e = 0; e <= 537; ++e) {
    a = std::min(1.0, a + 0.004 * gen.uniform() - 0.001);
    r.alpha_trajectory.emplace_back(e, a);
  }
  const auto kept = io::subsample_trajectory(r.alpha_trajectory);
  EXPECT_LT(kept.size(), r.alpha_trajectory.size());
  for (int e = 0; e <= 100; ++e)
    EXPECT_EQ(kept[std::size_t(e)].first, e);
  EXPECT_EQ(kept.back().first, 537);

  const auto back = io::run_record_from_json(io::json::parse(io::to_json(r).dump()));
  for (double level = 0.0; level <= 1.0; level += 0.01)
    EXPECT_EQ(back.first_epoch_reaching(level), r.first_epoch_reaching(level)) << level;
}

TEST(RunRecordJson, JsonlSkipsProvenanceHeader) {
  run_record r;
  r.graph_id = "kings-3x3";
  r.init = init_kind::warm_start_qe;
  r.seed = 12;
  r.target_alpha = 0.95;
  r.epochs_to_target = 3;
  r.initial_hd_to_mis = 2;
  r.n = 3;
  r.alpha_trajectory = {{0, 0.5}, {1, 0.5}, {2, 0.75}, {3, 1.0}};
  r.final_config = spin_configuration::from_bitstring("101");
  const auto path = temp_file("runs.jsonl");
  io::write_text(path.string(), io::to_jsonl(io::json{{"command", "test"}}, {r, r}));
  const auto recs = io::read_jsonl(path.string());
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].init, init_kind::warm_start_qe);
  EXPECT_EQ(recs[0].epochs_to_target, 3);
  EXPECT_EQ(recs[0].alpha_trajectory, r.alpha_trajectory);
  EXPECT_EQ(recs[1].final_config, r.final_config);

  const auto line = io::to_json(r);
  for (const char *key : {"graph_id", "init_kind", "seed", "target_alpha", "epochs_to_target", "initial_hd",
                          "alpha_trajectory", "final_config"})
    EXPECT_TRUE(line.contains(key)) << key;
  fs::remove(path);
}

TEST(RatioCsv, RoundTripWithComment) {
  std::vector<analysis::ratio_point> pts{{0.1, 2.5, 20, analysis::ratio_source::aqc},
                                         {0.3, 0.75, 18, analysis::ratio_source::model_pipeline}};
  const auto text = io::to_csv(pts, "provenance: {}");
  EXPECT_NE(text.find("hd_over_n,epoch_ratio,n,source\n"), std::string::npos);
  const auto path = temp_file("points.csv");
  io::write_text(path.string(), text);
  const auto back = io::read_ratio_csv(path.string());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_DOUBLE_EQ(back[0].epoch_ratio, 2.5);
  EXPECT_EQ(back[0].source, analysis::ratio_source::aqc);
  EXPECT_EQ(back[1].n, 18u);

  io::write_text(path.string(), "a,b\n1,2\n");
  EXPECT_THROW(io::read_ratio_csv(path.string()), invalid_input);
  fs::remove(path);
}
