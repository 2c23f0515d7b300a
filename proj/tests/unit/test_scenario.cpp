#include <gtest/gtest.h>

#include <filesystem>
#include <queue>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "riskplan/params.hpp"
#include "riskplan/scenario.hpp"

using namespace riskplan;
using json = nlohmann::json;

namespace {

std::string error_of(const std::string& text) {
  try {
    from_json(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

json minimal() {
  return json::parse(R"({
    "map": {"width": 10, "height": 8, "resolution": 1.0},
    "start": [0, 0], "goal": [9, 7], "seed": 0,
    "obstacles": [{"id": 1, "class": "TemporarilyStatic", "mu": [5.5, 4.5], "sigma": [1.0, 0.5],
                   "velocity": [0, 0], "weight": 3.0,
                   "trigger": {"activation_distance": 4.0, "post_velocity": [-0.5, -0.3]}}]
  })");
}

}  // namespace

TEST(Params, DefaultsAreValidAndSerializable) {
  const PlannerParams p;
  EXPECT_NO_THROW(validate(p));
  PlannerParams q;
  for (const auto& [k, v] : param_entries(p)) EXPECT_TRUE(set_param(q, k, v)) << k;
  EXPECT_EQ(p, q);
  EXPECT_FALSE(set_param(q, "no_such_key", 1.0));
  EXPECT_TRUE(is_flag_param("backward_prediction"));
  EXPECT_FALSE(is_flag_param("lambda"));
}

TEST(Params, NegativeWeightsViolateInvariants) {
  PlannerParams p;
  p.lambda = -1.0;
  EXPECT_THROW(validate(p), InvariantError);
  p = {};
  p.dt = 0.0;
  EXPECT_THROW(validate(p), InvariantError);
}

TEST(Scenario, JsonRoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ScenarioConfig cfg = generate_random_map(30, 20, 5, 2, seed);
    const std::string text = to_json(cfg);
    EXPECT_EQ(to_json(from_json(text)), text);
  }
}

TEST(Scenario, MinimalDocumentLoadsWithDefaultParams) {
  const ScenarioConfig cfg = from_json(minimal().dump());
  EXPECT_EQ(cfg.map.width, 10);
  ASSERT_EQ(cfg.obstacles.size(), 1u);
  ASSERT_TRUE(cfg.obstacles[0].trigger);
  EXPECT_EQ(cfg.obstacles[0].trigger->post_velocity, Vec2(-0.5, -0.3));
  EXPECT_EQ(cfg.params, PlannerParams{});
}

TEST(Scenario, ErrorsNameTheOffendingField) {
  json j = minimal();
  j["map"]["width"] = "ten";
  EXPECT_NE(error_of(j.dump()).find("$.map.width"), std::string::npos);

  j = minimal();
  j["obstacles"][0]["sigma"] = json::array({1.0});
  EXPECT_NE(error_of(j.dump()).find("$.obstacles[0].sigma"), std::string::npos);

  j = minimal();
  j["params"]["lamda"] = 3;
  EXPECT_NE(error_of(j.dump()).find("lamda"), std::string::npos);

  EXPECT_FALSE(error_of("{not json").empty());
}

TEST(Scenario, InvariantsAreEnforcedOnLoad) {
  json j = minimal();
  j["obstacles"][0]["sigma"] = json::array({0.0, 1.0});
  EXPECT_THROW(from_json(j.dump()), InvariantError);

  j = minimal();
  j["start"] = json::array({5, 4});  // under the obstacle footprint
  EXPECT_THROW(from_json(j.dump()), InvariantError);

  j = minimal();
  j["obstacles"][0]["class"] = "StationaryStructure";
  EXPECT_THROW(from_json(j.dump()), InvariantError);
}

TEST(Scenario, LabelsResolveThroughTheSemanticTable) {
  json j = minimal();
  j["obstacles"][0].erase("class");
  j["obstacles"][0].erase("weight");
  j["obstacles"][0]["label"] = "person_standing";
  const ScenarioConfig cfg = from_json(j.dump());
  EXPECT_EQ(cfg.obstacles[0].cls, ObstacleClass::TemporarilyStatic);
  EXPECT_DOUBLE_EQ(cfg.obstacles[0].semantic_weight, 3.0);
}

TEST(Semantic, UnknownLabelsNeedAFallback) {
  const SemanticTable t = SemanticTable::defaults();
  EXPECT_THROW(classify_semantic("unicorn", t), InputError);
  const SemanticTable with_fallback(t.entries(), SemanticEntry{ObstacleClass::StationaryStructure, 1.0});
  EXPECT_EQ(classify_semantic("unicorn", with_fallback).cls, ObstacleClass::StationaryStructure);
}

TEST(Semantic, TemporarilyStaticMustOutweighStructures) {
  std::map<std::string, SemanticEntry> bad{{"wall", {ObstacleClass::StationaryStructure, 2.0}},
                                           {"person", {ObstacleClass::TemporarilyStatic, 1.5}}};
  EXPECT_THROW(SemanticTable{bad}, InvariantError);
}

TEST(Grid, RasterizesOneSigmaFootprints) {
  GridMap g(10, 10, 1.0);
  Obstacle o;
  o.mu = {5.0, 5.0};
  o.sigma_x = 2.0;
  o.sigma_y = 1.0;
  g.rasterize({o});
  EXPECT_TRUE(g.occupied({5, 5}));
  EXPECT_TRUE(g.occupied({6, 4}));
  EXPECT_FALSE(g.occupied({5, 6}));
  EXPECT_FALSE(g.occupied({7, 5}));
  EXPECT_EQ(g.cell_of({3.7, 9.99}), (Cell{3, 9}));
}

TEST(Generator, SameSeedSameMap) {
  EXPECT_EQ(to_json(generate_random_map(50, 50, 12, 2, 17)), to_json(generate_random_map(50, 50, 12, 2, 17)));
  EXPECT_NE(to_json(generate_random_map(50, 50, 12, 2, 17)), to_json(generate_random_map(50, 50, 12, 2, 18)));
}

TEST(Generator, MapsAreConnectedAndWellFormed) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ScenarioConfig cfg = generate_random_map(50, 50, 12, 2, seed);
    EXPECT_NO_THROW(validate(cfg));
    int risky = 0;
    for (const auto& o : cfg.obstacles) risky += o.cls == ObstacleClass::TemporarilyStatic ? 1 : 0;
    EXPECT_EQ(risky, 2);
    EXPECT_TRUE(oracle::dijkstra(cfg.grid(), cfg.start, cfg.goal)) << seed;
  }
}

TEST(Generator, ImpossibleRequestsFail) {
  EXPECT_THROW(generate_random_map(6, 6, 200, 2, 1), InputError);
}

TEST(Files, SaveThenLoad) {
  const auto path = std::filesystem::temp_directory_path() / "riskplan_scenario_roundtrip.json";
  const ScenarioConfig cfg = generate_random_map(20, 20, 3, 1, 5);
  save_scenario(cfg, path);
  EXPECT_EQ(to_json(load_scenario(path)), to_json(cfg));
  std::filesystem::remove(path);
  EXPECT_THROW(load_scenario(path), InputError);
}
