#include <gtest/gtest.h>

#include "mecanchor/objective.hpp"
#include "support.hpp"

using namespace mecanchor;
using testing_support::path_graph;

TEST(Percentile, NearestRank) {
    EXPECT_EQ(nearest_rank_percentile({0, 1, 1, 2, 3, 3, 4, 5, 6, 10}, 0.9), 6.0);
    EXPECT_EQ(nearest_rank_percentile({10, 6, 5, 4, 3, 3, 2, 1, 1, 0}, 0.9), 6.0);
    EXPECT_EQ(nearest_rank_percentile({7}, 0.9), 7.0);
    EXPECT_EQ(nearest_rank_percentile({}, 0.9), 0.0);
    // 11 values: rank ceil(9.9) = 10
    EXPECT_EQ(nearest_rank_percentile({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.9), 9.0);
}

TEST(LatencyObjective, LocalServiceIsZero) {
    auto g = path_graph(4);
    std::vector<NodeId> x{0, 1, 2, 3};
    EXPECT_EQ(latency_objective(x, x, g.latency_matrix(), LatencyMode::p90), 0.0);
    EXPECT_EQ(latency_objective(x, x, g.latency_matrix(), LatencyMode::mean), 0.0);
}

TEST(LatencyObjective, SingleVehicleOnCore) {
    // core hangs off site 0, vehicle at site 1: two hops
    auto g = path_graph(2, 0);
    std::vector<NodeId> x{1};
    std::vector<NodeId> z{g.core()};
    EXPECT_EQ(latency_objective(x, z, g.latency_matrix(), LatencyMode::p90), 2.0);
}

TEST(LatencyObjective, RejectsMissingAssignments) {
    auto g = path_graph(3);
    std::vector<NodeId> x{0, 1};
    std::vector<NodeId> z{0};
    EXPECT_THROW(latency_objective(x, z, g.latency_matrix(), LatencyMode::mean), std::invalid_argument);
    std::vector<NodeId> bad{0, kNoNode};
    EXPECT_THROW(latency_objective(x, bad, g.latency_matrix(), LatencyMode::mean), std::invalid_argument);
}

TEST(DeploymentOverhead, Examples) {
    EXPECT_EQ(deployment_overhead({1, 2}, {1, 2}, 1.0, 0.1), 0.0);
    EXPECT_DOUBLE_EQ(deployment_overhead({1, 2}, {2, 3}, 1.0, 0.1), 1.1);
    EXPECT_EQ(deployment_overhead({}, {0, 3, 5, 7}, 1.0, 0.1), 4.0);
    EXPECT_DOUBLE_EQ(deployment_overhead({0, 3}, {}, 1.0, 0.1), 0.2);
}

TEST(ReassignmentOverhead, Examples) {
    auto g = path_graph(4, 0);
    const auto& o = g.relocation_matrix();
    std::vector<NodeId> z{0, 2, g.core()};
    EXPECT_EQ(reassignment_overhead(z, z, o), 0.0);
    // core -> site 1 on c-e0-e1
    std::vector<NodeId> from{g.core()};
    std::vector<NodeId> to{1};
    EXPECT_EQ(reassignment_overhead(from, to, o), 2.0);
    std::vector<NodeId> before{0, 3};
    std::vector<NodeId> swapped{3, 0};
    EXPECT_EQ(reassignment_overhead(before, swapped, o), 2.0 * g.hops(0, 3));
}

TEST(Scalarize, WeightedNormalizedSum) {
    CostModel cost;
    cost.norm_f1 = 20;
    cost.norm_f2 = 10;
    cost.norm_f3 = 100;
    EXPECT_EQ(scalarize(0, 0, 0, cost), 0.0);
    EXPECT_NEAR(scalarize(4, 1.1, 6, cost), 0.1425, 1e-15);
    cost.weights = {1.0, 0.0, 0.0};
    EXPECT_EQ(scalarize(4, 1.1, 6, cost), 4.0 / 20.0);
}

TEST(CostModel, NormalizersFromGraph) {
    auto g = path_graph(5, 2);  // diameter 4, core in the middle
    auto cost = CostModel::make(g, Weights{}, 1.0, 0.1, 2, 7);
    EXPECT_EQ(cost.norm_f1, 4.0);
    EXPECT_EQ(cost.norm_f2, 6.0);  // five sites plus the core
    EXPECT_EQ(cost.norm_f3, 7.0 * 4);
    auto empty = CostModel::make(g, Weights{}, 1.0, 0.1, 2, 0);
    EXPECT_EQ(empty.norm_f3, 4.0);
}

TEST(CostModel, Validation) {
    auto g = path_graph(3);
    auto cost = CostModel::make(g, Weights{}, 1.0, 0.1, 2, 5);
    EXPECT_NO_THROW(cost.validate(3));
    cost.n_anchor_points = 4;
    EXPECT_THROW(cost.validate(3), ConfigError);
    cost.n_anchor_points = 0;
    EXPECT_THROW(cost.validate(3), ConfigError);
    EXPECT_THROW((Weights{0.5, 0.5, 0.5}.validate()), ConfigError);
    EXPECT_THROW((Weights{1.5, -0.25, -0.25}.validate()), ConfigError);
    EXPECT_NO_THROW((Weights{1.0, 0.0, 0.0}.validate()));
}

TEST(ValidateDecision, DetectsEachConstraint) {
    auto g = path_graph(3);
    auto cost = CostModel::make(g, Weights{}, 1.0, 0.1, 2, 2);
    std::vector<std::string> ids{"a", "b"};

    Decision ok{{0, 2}, {0, g.core()}};
    EXPECT_TRUE(validate_decision(ok, ids, cost, g, false).empty());

    Decision missing{{0, 2}, {0}};
    auto v1 = validate_decision(missing, ids, cost, g, false);
    ASSERT_EQ(v1.size(), 1u);
    EXPECT_EQ(v1[0].constraint, Constraint::unicity);
    EXPECT_EQ(v1[0].subject, "b");

    Decision uncovered{{0, 2}, {0, 1}};
    auto v2 = validate_decision(uncovered, ids, cost, g, false);
    ASSERT_EQ(v2.size(), 1u);
    EXPECT_EQ(v2[0].constraint, Constraint::coverage);

    Decision too_many{{0, 1, 2}, {0, 1}};
    auto v3 = validate_decision(too_many, ids, cost, g, false);
    ASSERT_EQ(v3.size(), 1u);
    EXPECT_EQ(v3[0].constraint, Constraint::resource_usage);

    Decision centralized{{}, {g.core(), g.core()}};
    EXPECT_TRUE(validate_decision(centralized, ids, cost, g, true).empty());
    EXPECT_EQ(validate_decision(centralized, ids, cost, g, false).size(), 1u);
}

TEST(PlanningObjective, MatchesNaiveLoops) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto inst = testing_support::random_instance(seed, 8, 3, 20);
        const auto& g = *inst.graph;
        Weights w{0.3, 0.3, 0.4};
        auto cost = CostModel::make(g, w, 1.0, 0.1, inst.k, inst.vehicles.size());
        Decision d{inst.deployed, inst.previous};
        EXPECT_EQ(planning_objective(d, inst.predicted, inst.previous, inst.deployed, g, cost),
                  testing_support::naive_planning(d, inst, w));
    }
}
