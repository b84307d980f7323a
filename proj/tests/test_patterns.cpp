#include <gtest/gtest.h>

#include <random>

#include "missionware/patterns.hpp"
#include "missionware/stamp.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace missionware;

namespace {

PatternApplication catalog(const std::string& name) {
  return pattern_from_json(io::parse_file(mwtest::data_path("patterns/" + name + ".json")));
}

PatternApplication make(PatternKind kind, std::string target, std::size_t n = 2) {
  PatternApplication app;
  app.kind = kind;
  app.target = std::move(target);
  app.params.replica_count = n;
  return app;
}

ErrorCode apply_error(const SGraph& g, const PatternApplication& app) {
  try {
    apply(g, app);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "rewrite accepted";
  return ErrorCode::UnknownNode;
}

std::vector<std::string> components(const SGraph& g) {
  std::vector<std::string> out;
  for (const auto& n : g.nodes()) {
    if (is_component(n.kind)) out.push_back(n.id);
  }
  return out;
}

constexpr PatternKind kAllKinds[] = {PatternKind::DiverseRedundancy, PatternKind::VerifiableVoting,
                                     PatternKind::PhysicalConfigHopping, PatternKind::VirtualConfigHopping};

}  // namespace

TEST(Patterns, DiverseRedundancyReplacesTarget) {
  auto app = make(PatternKind::DiverseRedundancy, "flight_controller");
  app.params.diversity_attribute = "supplier";
  app.params.diversity_values = {"vendorA", "vendorB"};
  auto g = apply(mwtest::uav(), app);

  EXPECT_EQ(g.find("flight_controller"), nullptr);
  EXPECT_EQ(g.node("flight_controller_1").attribute("supplier"), "vendorA");
  EXPECT_EQ(g.node("flight_controller_2").attribute("supplier"), "vendorB");
  EXPECT_EQ(g.node("flight_controller_2").attribute("replica_of"), "flight_controller");
  EXPECT_EQ(g.node("flight_controller_1").attribute("patterns"), std::string(tags::kDiverseRedundancy));

  // Both replicas take over every edge of the target.
  auto has = [&](const std::string& from, const std::string& to, EdgeKind kind) {
    for (const auto& e : g.edges()) {
      if (e.from == from && e.to == to && e.kind == kind) return true;
    }
    return false;
  };
  for (const char* r : {"flight_controller_1", "flight_controller_2"}) {
    EXPECT_TRUE(has("comms_link", r, EdgeKind::Connectivity)) << r;
    EXPECT_TRUE(has("gps", r, EdgeKind::Feedback)) << r;
    EXPECT_TRUE(has(r, "control_surfaces", EdgeKind::ControlAction)) << r;
  }
  EXPECT_EQ(g.node("hazard_loss_of_control").truth_table->inputs.size(), 3U);
}

TEST(Patterns, VotingAddsVoterAndDetector) {
  auto g = apply(mwtest::uav(), make(PatternKind::VerifiableVoting, "imaging_payload"));
  const auto& voter = g.node("imaging_payload_voter");
  const auto& detect = g.node("imaging_payload_voter_disagreement_detected");
  EXPECT_EQ(voter.kind, NodeKind::Logic);
  EXPECT_EQ(voter.attribute("role"), "voter");
  EXPECT_EQ(detect.attribute("role"), "disagreement_detected");
  EXPECT_EQ(detect.truth_table->inputs, (std::vector<std::string>{"imaging_payload_1", "imaging_payload_2"}));
  EXPECT_TRUE(validate(g).analysis_ready);
}

TEST(Patterns, HoppingAddsIsolatedController) {
  auto g = apply(mwtest::uav(), catalog("hop_flight_controller"));
  const auto& hop = g.node("flight_controller_hop_controller");
  EXPECT_EQ(hop.kind, NodeKind::Controller);
  EXPECT_EQ(hop.attribute("hop_period"), "1");
  for (const auto& e : g.edges()) {
    EXPECT_NE(e.from, hop.id);
    EXPECT_NE(e.to, hop.id);
  }
  EXPECT_EQ(g.node("flight_controller_1").attribute("hop_group"), hop.id);
}

TEST(Patterns, VirtualHoppingMarksReplicas) {
  auto g = apply(mwtest::uav(), make(PatternKind::VirtualConfigHopping, "gps", 3));
  for (const char* r : {"gps_1", "gps_2", "gps_3"}) EXPECT_EQ(g.node(r).attribute("virtual"), "true");
  EXPECT_EQ(g.node("gps_hop_controller").attribute("virtual"), "true");
}

TEST(Patterns, VoterFlagsMajorityOnly) {
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<std::string> ids;
    for (std::size_t i = 1; i <= n; ++i) ids.push_back(replica_id("r", i));
    auto voter = voter_table(ids);
    auto disagree = disagreement_table(ids);
    for (std::uint32_t row = 0; row < (1U << n); ++row) {
      auto k = static_cast<std::size_t>(__builtin_popcount(row));
      EXPECT_EQ(voter.at(row), k >= (n + 1) / 2) << n << " " << row;
      EXPECT_EQ(disagree.at(row), k > 0 && k < n) << n << " " << row;
    }
  }
}

TEST(Patterns, ParameterErrors) {
  const auto& g = mwtest::uav();
  EXPECT_EQ(apply_error(g, make(PatternKind::DiverseRedundancy, "gps", 1)), ErrorCode::BadParams);
  EXPECT_EQ(apply_error(g, make(PatternKind::DiverseRedundancy, "gps", 17)), ErrorCode::BadParams);
  EXPECT_EQ(apply_error(g, make(PatternKind::DiverseRedundancy, "nowhere")), ErrorCode::UnknownTarget);
  EXPECT_EQ(apply_error(g, make(PatternKind::DiverseRedundancy, mwtest::kLatLongHazard)), ErrorCode::BadParams);

  auto mismatch = make(PatternKind::DiverseRedundancy, "gps", 3);
  mismatch.params.diversity_attribute = "supplier";
  mismatch.params.diversity_values = {"x", "y"};
  EXPECT_EQ(apply_error(g, mismatch), ErrorCode::BadParams);
  mismatch.params.diversity_values = {"x", "y", "x"};
  EXPECT_EQ(apply_error(g, mismatch), ErrorCode::BadParams);

  auto reserved = make(PatternKind::DiverseRedundancy, "gps");
  reserved.params.diversity_attribute = "replica_of";
  reserved.params.diversity_values = {"a", "b"};
  EXPECT_EQ(apply_error(g, reserved), ErrorCode::BadParams);

  auto hop = make(PatternKind::PhysicalConfigHopping, "gps");
  hop.params.hop_period = 0;
  EXPECT_EQ(apply_error(g, hop), ErrorCode::BadParams);
}

TEST(Patterns, IdCollision) {
  auto once = apply(mwtest::uav(), make(PatternKind::DiverseRedundancy, "gps"));
  // A second gps would mint gps_1 and gps_2 again.
  auto doc = to_json(once);
  doc["nodes"].push_back({{"id", "gps"}, {"kind", "Sensor"}});
  auto again = model_from_json(doc);
  EXPECT_EQ(apply_error(again, make(PatternKind::DiverseRedundancy, "gps")), ErrorCode::IdCollision);

  auto voting = make(PatternKind::VerifiableVoting, "gps");
  voting.params.voter_id = "attitude_sensor";
  EXPECT_EQ(apply_error(mwtest::uav(), voting), ErrorCode::IdCollision);
}

TEST(Patterns, CatalogPreservesNominalOnUav) {
  for (const char* name : {"hop_flight_controller", "vote_gps", "vote_flight_controller", "duplicate_flight_controller"}) {
    auto g = apply(mwtest::uav(), catalog(name));
    EXPECT_TRUE(preserves_nominal(mwtest::uav(), g)) << name;
    EXPECT_TRUE(validate(g).analysis_ready) << name;
  }
}

TEST(Patterns, EveryKindOnEveryUavComponentPreservesNominal) {
  const auto& base = mwtest::uav();
  for (const auto& target : components(base)) {
    for (auto kind : kAllKinds) {
      for (std::size_t n : {2U, 3U}) {
        EXPECT_TRUE(preserves_nominal(base, apply(base, make(kind, target, n)))) << target;
      }
    }
  }
}

TEST(Patterns, StackedRewritesPreserveNominal) {
  const auto& base = mwtest::uav();
  auto g = apply(apply(base, catalog("hop_flight_controller")), catalog("vote_gps"));
  EXPECT_TRUE(preserves_nominal(base, g));
  // Replicating a replica still mirrors the original leaf.
  auto deeper = apply(g, make(PatternKind::DiverseRedundancy, "gps_1"));
  EXPECT_EQ(deeper.node("gps_1_2").attribute("replica_of"), "gps");
  EXPECT_TRUE(preserves_nominal(base, deeper));
}

TEST(Patterns, RandomGraphsPreserveNominal) {
  std::mt19937_64 rng(83);
  int applied = 0;
  for (int i = 0; i < 60; ++i) {
    auto g = mwtest::random_graph(rng);
    auto comps = components(g);
    if (comps.empty()) continue;
    auto app = make(kAllKinds[mwtest::pick(rng, 0, 3)], comps[mwtest::pick(rng, 0, comps.size() - 1)],
                    mwtest::pick(rng, 2, 4));
    auto rewritten = apply(g, app);
    EXPECT_TRUE(preserves_nominal(g, rewritten)) << app.target;
    ++applied;
  }
  EXPECT_GT(applied, 40);
}

TEST(Patterns, IdentityPreservesAndCorruptionIsCaught) {
  const auto& base = mwtest::uav();
  EXPECT_TRUE(preserves_nominal(base, base));

  auto g = apply(base, make(PatternKind::DiverseRedundancy, "gps"));
  auto nodes = g.nodes();
  for (auto& n : nodes) {
    if (n.id == "nav_data_corrupt") {
      // OR over (gps', attitude) became AND: a lone gps fault no longer propagates.
      n.truth_table = TruthTable::from_function(n.truth_table->inputs, [](const std::vector<bool>& v) {
        return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
      });
    }
  }
  EXPECT_FALSE(preserves_nominal(base, SGraph::build(nodes, g.edges())));
}

TEST(Patterns, IncomparableGraphsAreRejected) {
  const auto& base = mwtest::uav();
  std::vector<Node> nodes;
  for (const auto& n : base.nodes()) {
    if (n.id != "loss_vehicle") nodes.push_back(n);
  }
  auto smaller = SGraph::build(nodes, base.edges());
  EXPECT_THROW(preserves_nominal(base, smaller), Error);
}

TEST(Patterns, OutcomeNodesSurvive) {
  const auto& base = mwtest::uav();
  for (const auto& target : components(base)) {
    auto g = apply(base, make(PatternKind::VerifiableVoting, target));
    for (const auto& n : base.nodes()) {
      if (n.kind == NodeKind::MissionLoss || n.kind == NodeKind::Hazard || n.kind == NodeKind::PhysicalState) {
        EXPECT_NE(g.find(n.id), nullptr) << n.id;
      }
    }
    EXPECT_EQ(g.size(), base.size() + 3);
  }
}

TEST(Patterns, Deterministic) {
  auto app = catalog("vote_gps");
  EXPECT_EQ(to_json(apply(mwtest::uav(), app)).dump(), to_json(apply(mwtest::uav(), app)).dump());
}

TEST(Patterns, JsonRoundTrip) {
  for (const char* name : {"hop_flight_controller", "vote_gps", "vote_flight_controller", "duplicate_flight_controller"}) {
    auto app = catalog(name);
    auto again = pattern_from_json(to_json(app));
    EXPECT_EQ(again.kind, app.kind);
    EXPECT_EQ(again.target, app.target);
    EXPECT_EQ(again.costs, app.costs);
    EXPECT_EQ(to_json(again).dump(), to_json(app).dump());
  }
}

TEST(Patterns, JsonErrors) {
  EXPECT_THROW(pattern_from_json(Json::parse(R"({"kind": "Mirror", "target": "gps"})")), Error);
  EXPECT_THROW(pattern_from_json(Json::parse(R"({"kind": "DiverseRedundancy", "target": "gps", "colour": 1})")), Error);
  try {
    pattern_from_json(
        Json::parse(R"({"kind": "DiverseRedundancy", "target": "gps", "costs": {"performance_degradation": 2}})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadParams);
  }
}
