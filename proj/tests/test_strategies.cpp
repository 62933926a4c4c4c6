#include <gtest/gtest.h>

#include <map>

#include "mecanchor/strategies.hpp"
#include "support.hpp"

using namespace mecanchor;
using testing_support::path_graph;

namespace {

TopologyGraph far_pairs() {
    // {0,1} near the origin, {2,3} 5 km away
    return build_graph({{0, 0, 0}, {1, 100, 0}, {2, 5000, 0}, {3, 5100, 0}});
}

TopologyGraph two_cliques() {
    std::vector<Site> sites;
    for (int i = 0; i < 6; ++i) {
        sites.push_back({i, 100.0 * i, 0});
    }
    std::vector<Link> links{{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {3, 4, 1}, {3, 5, 1}, {4, 5, 1}, {2, 3, 1}};
    return TopologyGraph(sites, links, 2, 1.0);
}

double mean_latency(const TopologyGraph& g, std::span<const NodeId> x, std::span<const NodeId> z) {
    return latency_objective(x, z, g.latency_matrix(), LatencyMode::mean);
}

}  // namespace

TEST(StrategyNames, RoundTrip) {
    for (auto kind : comparison_strategies()) {
        EXPECT_EQ(parse_strategy(to_string(kind)), kind);
    }
    EXPECT_EQ(comparison_strategies().size(), 9u);
    EXPECT_EQ(parse_strategy("exact_oracle"), StrategyKind::exact_oracle);
    EXPECT_EQ(parse_strategy("overhead_aware"), StrategyKind::overhead_aware_greedy_average);
    EXPECT_THROW(parse_strategy("best"), ConfigError);
}

TEST(MakeStrategy, RejectsOutOfRangeK) {
    auto g = path_graph(3);
    EXPECT_THROW(make_strategy(StrategyKind::greedy_average, g, 0, 0), ConfigError);
    EXPECT_THROW(make_strategy(StrategyKind::greedy_average, g, 4, 0), ConfigError);
    auto big = path_graph(13);
    EXPECT_THROW(make_strategy(StrategyKind::exact_oracle, big, 2, 0), ConfigError);
    auto mid = path_graph(8);
    EXPECT_THROW(make_strategy(StrategyKind::exact_oracle, mid, 5, 0), ConfigError);
    EXPECT_NO_THROW(make_strategy(StrategyKind::exact_oracle, mid, 4, 0));
}

TEST(AssignClosest, Examples) {
    auto g = path_graph(3);
    std::vector<NodeId> at_deployed{2};
    EXPECT_EQ(assign_closest({2}, at_deployed, g)[0], 2);
    std::vector<NodeId> middle{1};
    EXPECT_EQ(assign_closest({0, 2}, middle, g)[0], 0);
    EXPECT_THROW(assign_closest({}, middle, g), std::invalid_argument);
}

TEST(Centralized, EverythingOnTheCore) {
    auto g = path_graph(4);
    auto strategy = make_strategy(StrategyKind::centralized, g, 2, 0);
    std::vector<NodeId> x{0, 1, 3};
    std::vector<NodeId> z(3, g.core());
    Deployment y;
    auto cost = CostModel::make(g, Weights{}, 1, 0.1, 2, 3);
    auto d = strategy->decide(SlotInput{x, z, y, 0}, cost);
    EXPECT_TRUE(d.deployed_next.empty());
    EXPECT_EQ(d.anchors, z);
    EXPECT_EQ(deployment_overhead(y, d.deployed_next, 1, 0.1), 0.0);
    EXPECT_EQ(reassignment_overhead(z, d.anchors, g.relocation_matrix()), 0.0);
}

TEST(StaticKMeans, DegenerateAndTwoPairs) {
    auto g = far_pairs();
    EXPECT_EQ(static_kmeans_deployment(g, 4, 0), (Deployment{0, 1, 2, 3}));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto y = static_kmeans_deployment(g, 2, seed);
        ASSERT_EQ(y.size(), 2u);
        EXPECT_TRUE(y.contains(0) != y.contains(1));
        EXPECT_TRUE(y.contains(2) != y.contains(3));
    }
}

TEST(StaticKMeans, FixedAcrossSlots) {
    auto g = far_pairs();
    auto strategy = make_strategy(StrategyKind::static_kmeans, g, 2, 3);
    auto cost = CostModel::make(g, Weights{}, 1, 0.1, 2, 2);
    std::vector<NodeId> z(2, g.core());
    std::vector<NodeId> x1{0, 3};
    std::vector<NodeId> x2{1, 1};
    Deployment empty;
    auto first = strategy->decide(SlotInput{x1, z, empty, 0}, cost);
    auto second = strategy->decide(SlotInput{x2, first.anchors, first.deployed_next, 1}, cost);
    EXPECT_EQ(deployment_overhead(first.deployed_next, second.deployed_next, 1, 0.1), 0.0);
}

TEST(Greedy, SingleBusySite) {
    auto g = path_graph(5);
    std::vector<NodeId> x{3, 3, 3};
    EXPECT_EQ(greedy_deployment(x, g, 1, LatencyMode::mean), Deployment{3});
    EXPECT_EQ(greedy_deployment(x, g, 1, LatencyMode::p90), Deployment{3});
}

TEST(Greedy, AverageOnThreeSiteLine) {
    auto g = path_graph(3);
    std::vector<NodeId> x{0, 1, 2};
    // candidate sums: e0 -> 3, e1 -> 2, e2 -> 3
    EXPECT_EQ(greedy_deployment(x, g, 1, LatencyMode::mean), Deployment{1});
}

TEST(Greedy, PercentileBreaksTiesOnSumThenId) {
    auto g = path_graph(3);
    // 10 vehicles, rank 9: e0 and e1 both reach p90 = 1, e1 with the smaller sum
    std::vector<NodeId> x{0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
    EXPECT_EQ(greedy_deployment(x, g, 1, LatencyMode::p90), Deployment{1});
    // p90 and sum both tie between e0 and e1
    std::vector<NodeId> pair{0, 1};
    EXPECT_EQ(greedy_deployment(pair, g, 1, LatencyMode::p90), Deployment{0});
}

TEST(Greedy, FullDeploymentServesLocally) {
    auto g = path_graph(6);
    std::vector<NodeId> x{0, 2, 2, 5, 4};
    auto y = greedy_deployment(x, g, 6, LatencyMode::mean);
    EXPECT_EQ(mean_latency(g, x, assign_closest(y, x, g)), 0.0);
}

TEST(Greedy, NestedDeploymentsImproveMonotonically) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto inst = testing_support::random_instance(seed, 12, 1, 30);
        const auto& g = *inst.graph;
        for (auto mode : {LatencyMode::mean, LatencyMode::p90}) {
            double last_mean = 1e300;
            double last_p90 = 1e300;
            Deployment previous;
            for (int k = 1; k <= static_cast<int>(g.edge_count()); ++k) {
                auto y = greedy_deployment(inst.predicted, g, k, mode);
                ASSERT_EQ(y.size(), static_cast<std::size_t>(k));
                EXPECT_TRUE(std::includes(y.begin(), y.end(), previous.begin(), previous.end()));
                auto z = assign_closest(y, inst.predicted, g);
                double mean = mean_latency(g, inst.predicted, z);
                double p90 = latency_objective(inst.predicted, z, g.latency_matrix(), LatencyMode::p90);
                EXPECT_LE(mean, last_mean);
                EXPECT_LE(p90, last_p90);
                last_mean = mean;
                last_p90 = p90;
                previous = y;
            }
            EXPECT_EQ(last_mean, 0.0);
        }
    }
}

TEST(Random, UniformOverPairs) {
    // 5 sites choose 2: 10 equally likely subsets; chi-square with 9 dof.
    std::map<Deployment, int> counts;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        counts[random_deployment(5, 2, mix_seed(99, static_cast<std::uint64_t>(i)))]++;
    }
    ASSERT_EQ(counts.size(), 10u);
    const double expected = draws / 10.0;
    double chi2 = 0.0;
    for (const auto& [y, n] : counts) {
        chi2 += (n - expected) * (n - expected) / expected;
    }
    EXPECT_LT(chi2, 27.88);  // 0.999 quantile
}

TEST(Random, DeterministicPerSeed) {
    EXPECT_EQ(random_deployment(20, 5, 7), random_deployment(20, 5, 7));
    EXPECT_EQ(random_deployment(20, 5, 7).size(), 5u);
}

TEST(KMeansDeployment, Examples) {
    auto g = far_pairs();
    std::vector<NodeId> one{2, 2};
    EXPECT_EQ(kmeans_deployment(one, g, 1, 0), Deployment{2});
    std::vector<NodeId> groups{0, 1, 2, 3};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto y = kmeans_deployment(groups, g, 2, seed);
        EXPECT_TRUE(y.contains(0) != y.contains(1));
        EXPECT_TRUE(y.contains(2) != y.contains(3));
    }
    // all vehicles on site 2: pad with the site nearest to it
    std::vector<NodeId> crowd{2, 2, 2};
    EXPECT_EQ(kmeans_deployment(crowd, g, 2, 0), (Deployment{2, 3}));
    // nobody active: lowest ids
    std::vector<NodeId> none;
    EXPECT_EQ(kmeans_deployment(none, g, 2, 0), (Deployment{0, 1}));
}

TEST(ClusteredGreedy, SingletonsAndMiddleOfPath) {
    auto g = far_pairs();
    std::vector<NodeId> x{0, 3};
    EXPECT_EQ(clustered_greedy_deployment(x, g, 2, 0, ClusterMethod::kmeans), (Deployment{0, 3}));
    EXPECT_EQ(clustered_greedy_deployment(x, g, 2, 0, ClusterMethod::louvain), (Deployment{0, 3}));

    auto path = path_graph(3);
    std::vector<NodeId> even{0, 1, 2};
    EXPECT_EQ(clustered_greedy_deployment(even, path, 1, 0, ClusterMethod::kmeans), Deployment{1});
    EXPECT_EQ(clustered_greedy_deployment(even, path, 1, 0, ClusterMethod::louvain), Deployment{1});
}

TEST(ClusteredGreedy, LouvainOneAnchorPerClique) {
    auto g = two_cliques();
    std::vector<NodeId> x{0, 1, 2, 3, 4, 5};
    ActiveSites active = active_sites(x, g.edge_count());
    auto clusters = cluster_active_sites(active, g, 2, 0, ClusterMethod::louvain);
    EXPECT_EQ(clusters, (std::vector<std::vector<NodeId>>{{0, 1, 2}, {3, 4, 5}}));
    auto y = clustered_greedy_deployment(x, g, 2, 0, ClusterMethod::louvain);
    ASSERT_EQ(y.size(), 2u);
    EXPECT_LT(*y.begin(), 3);
    EXPECT_GE(*y.rbegin(), 3);
}

TEST(ClusteredGreedy, LouvainReconcilesCommunityCount) {
    auto g = two_cliques();
    std::vector<NodeId> x{0, 1, 2, 3, 4, 5};
    ActiveSites active = active_sites(x, g.edge_count());
    for (int k = 1; k <= 6; ++k) {
        auto clusters = cluster_active_sites(active, g, k, 5, ClusterMethod::louvain);
        ASSERT_EQ(clusters.size(), static_cast<std::size_t>(k));
        std::set<NodeId> covered;
        for (const auto& c : clusters) {
            EXPECT_FALSE(c.empty());
            covered.insert(c.begin(), c.end());
        }
        EXPECT_EQ(covered.size(), 6u);
    }
}

TEST(ClusteredGreedy, PaddingWhenFewActiveSites) {
    auto g = far_pairs();
    std::vector<NodeId> crowd{1, 1};
    EXPECT_EQ(clustered_greedy_deployment(crowd, g, 3, 0, ClusterMethod::kmeans), (Deployment{0, 1, 2}));
}

TEST(OverheadAware, RelocatesWhenLatencyDominates) {
    auto g = path_graph(2, 0);  // c - e0 - e1
    std::vector<NodeId> x{1};
    std::vector<NodeId> z{g.core()};
    Deployment y;
    auto cost = CostModel::make(g, Weights{0.5, 0.25, 0.25}, 1, 0.1, 1, 1);
    auto d = decide_overhead_aware(SlotInput{x, z, y, 0}, g, cost);
    EXPECT_EQ(d.deployed_next, Deployment{1});
    EXPECT_EQ(d.anchors, std::vector<NodeId>{1});
}

TEST(OverheadAware, KeepsCoreWhenRelocationDominates) {
    auto g = path_graph(2, 0);
    std::vector<NodeId> x{1};
    std::vector<NodeId> z{g.core()};
    Deployment y;
    auto cost = CostModel::make(g, Weights{0.1, 0.45, 0.45}, 1, 0.1, 1, 1);
    auto d = decide_overhead_aware(SlotInput{x, z, y, 0}, g, cost);
    EXPECT_EQ(d.anchors, std::vector<NodeId>{g.core()});
    EXPECT_EQ(d.deployed_next, Deployment{0});  // equal scores, lowest id
}

TEST(OverheadAware, StrandedGroupsMoveToClosestDeployedAnchor) {
    // path 0-1-2-3-4 with the core off site 2; three vehicles at 0 and one at 4,
    // each served locally. Only one anchor may stay and it is site 0.
    auto g = path_graph(5, 2);
    std::vector<NodeId> x{0, 0, 0, 4};
    std::vector<NodeId> z{0, 0, 0, 4};
    Deployment y{0, 4};
    auto cost = CostModel::make(g, Weights{0.2, 0.7, 0.1}, 1, 0.1, 1, 4);
    auto d = decide_overhead_aware(SlotInput{x, z, y, 0}, g, cost);
    ASSERT_EQ(d.deployed_next, Deployment{0});
    // the vehicle at 4 lost its anchor: site 0 is 4 links away, the core 3
    EXPECT_EQ(d.anchors[3], g.core());
    EXPECT_TRUE(validate_decision(d, std::vector<std::string>{"a", "b", "c", "d"}, cost, g, false).empty());
}

TEST(OverheadAware, PureLatencyMatchesGreedyAverage) {
    // With alpha = (1, 0, 0), a far core and everybody on it, every group
    // relocates as soon as any anchor is deployed, so the heuristic reduces to
    // greedy average deployment with closest-anchor latencies.
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        std::mt19937_64 rng(seed);
        const int e = std::uniform_int_distribution<int>(2, 10)(rng);
        std::vector<Site> sites;
        std::uniform_real_distribution<double> coordinate(0.0, 1500.0);
        for (int i = 0; i < e; ++i) {
            sites.push_back({i, coordinate(rng), coordinate(rng)});
        }
        GraphOptions options;
        options.core_link_weight = 1000.0;
        auto g = build_graph(sites, options);
        const int k = std::uniform_int_distribution<int>(1, e)(rng);
        const int v = std::uniform_int_distribution<int>(1, 25)(rng);
        std::vector<NodeId> x;
        for (int i = 0; i < v; ++i) {
            x.push_back(std::uniform_int_distribution<int>(0, e - 1)(rng));
        }
        std::vector<NodeId> z(x.size(), g.core());
        Deployment y;
        auto cost = CostModel::make(g, Weights{1.0, 0.0, 0.0}, 1, 0.1, k, x.size());
        auto d = decide_overhead_aware(SlotInput{x, z, y, 0}, g, cost);
        auto greedy = greedy_deployment(x, g, k, LatencyMode::mean);
        EXPECT_EQ(d.deployed_next, greedy) << "seed " << seed;
        auto closest = assign_closest(greedy, x, g);
        for (std::size_t i = 0; i < x.size(); ++i) {
            EXPECT_EQ(g.latency(x[i], d.anchors[i]), g.latency(x[i], closest[i])) << "seed " << seed;
        }
    }
}

TEST(OverheadAware, GroupingMakesDecisionsIndependentOfDuplication) {
    auto inst = testing_support::random_instance(8, 10, 3, 15);
    const auto& g = *inst.graph;
    auto cost = CostModel::make(g, Weights{}, 1, 0.1, inst.k, inst.predicted.size());
    auto single = decide_overhead_aware(SlotInput{inst.predicted, inst.previous, inst.deployed, 0}, g, cost);
    std::vector<NodeId> x2;
    std::vector<NodeId> z2;
    for (int copy = 0; copy < 2; ++copy) {
        x2.insert(x2.end(), inst.predicted.begin(), inst.predicted.end());
        z2.insert(z2.end(), inst.previous.begin(), inst.previous.end());
    }
    auto cost2 = CostModel::make(g, Weights{}, 1, 0.1, inst.k, x2.size());
    auto doubled = decide_overhead_aware(SlotInput{x2, z2, inst.deployed, 0}, g, cost2);
    EXPECT_EQ(doubled.deployed_next, single.deployed_next);
    for (std::size_t i = 0; i < inst.predicted.size(); ++i) {
        EXPECT_EQ(doubled.anchors[i], single.anchors[i]);
        EXPECT_EQ(doubled.anchors[i + inst.predicted.size()], single.anchors[i]);
    }
}

TEST(ExactOracle, TieGoesToLowestSubset) {
    auto g = path_graph(2, 0);
    std::vector<NodeId> x{0, 1};
    std::vector<NodeId> z(2, g.core());
    Deployment y;
    auto cost = CostModel::make(g, Weights{1, 0, 0}, 1, 0.1, 1, 2);
    auto d = exact_oracle(SlotInput{x, z, y, 0}, g, cost);
    EXPECT_EQ(d.deployed_next, Deployment{0});
}

TEST(ExactOracle, FullDeploymentServesLocally) {
    auto g = path_graph(4, 1);
    std::vector<NodeId> x{0, 1, 2, 3, 3};
    std::vector<NodeId> z(5, g.core());
    Deployment y;
    auto cost = CostModel::make(g, Weights{1, 0, 0}, 1, 0.1, 4, 5);
    auto d = exact_oracle(SlotInput{x, z, y, 0}, g, cost);
    EXPECT_EQ(d.deployed_next, (Deployment{0, 1, 2, 3}));
    EXPECT_EQ(d.anchors, x);
    EXPECT_EQ(planning_objective(d, x, z, y, g, cost), 0.0);
}

TEST(ExactOracle, MatchesBruteForceOverAllAssignments) {
    // Independent check: enumerate every subset and every per-vehicle anchor.
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        auto inst = testing_support::random_instance(seed, 5, 2, 4);
        const auto& g = *inst.graph;
        Weights w{0.4, 0.3, 0.3};
        auto cost = CostModel::make(g, w, 1, 0.1, inst.k, inst.vehicles.size());
        auto d = exact_oracle(SlotInput{inst.predicted, inst.previous, inst.deployed, 0}, g, cost);
        const double got = testing_support::naive_planning(d, inst, w);

        const int e = static_cast<int>(g.edge_count());
        double best = 1e300;
        for (int mask = 0; mask < (1 << e); ++mask) {
            if (__builtin_popcount(static_cast<unsigned>(mask)) != inst.k) {
                continue;
            }
            Deployment y;
            for (int s = 0; s < e; ++s) {
                if (mask & (1 << s)) {
                    y.insert(s);
                }
            }
            std::vector<NodeId> options(y.begin(), y.end());
            options.push_back(g.core());
            const std::size_t v = inst.vehicles.size();
            std::vector<std::size_t> pick(v, 0);
            while (true) {
                Decision candidate{y, std::vector<NodeId>(v)};
                for (std::size_t i = 0; i < v; ++i) {
                    candidate.anchors[i] = options[pick[i]];
                }
                best = std::min(best, testing_support::naive_planning(candidate, inst, w));
                std::size_t i = 0;
                while (i < v && ++pick[i] == options.size()) {
                    pick[i++] = 0;
                }
                if (i == v) {
                    break;
                }
            }
        }
        EXPECT_NEAR(got, best, 1e-12) << "seed " << seed;
    }
}

TEST(ExactOracle, NeverWorseThanHeuristic) {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto inst = testing_support::random_instance(seed, 7, 3, 15);
        const auto& g = *inst.graph;
        auto cost = CostModel::make(g, Weights{}, 1, 0.1, inst.k, inst.vehicles.size());
        SlotInput input{inst.predicted, inst.previous, inst.deployed, 0};
        auto optimal = exact_oracle(input, g, cost);
        auto heuristic = decide_overhead_aware(input, g, cost);
        EXPECT_LE(planning_objective(optimal, inst.predicted, inst.previous, inst.deployed, g, cost),
                  planning_objective(heuristic, inst.predicted, inst.previous, inst.deployed, g, cost) + 1e-12);
    }
}

TEST(AllStrategies, DecisionsSatisfyConstraints) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto inst = testing_support::random_instance(seed, 10, 4, 20);
        const auto& g = *inst.graph;
        auto cost = CostModel::make(g, Weights{}, 1, 0.1, inst.k, inst.vehicles.size());
        auto kinds = comparison_strategies();
        kinds.push_back(StrategyKind::exact_oracle);
        for (auto kind : kinds) {
            auto strategy = make_strategy(kind, g, inst.k, seed);
            auto d = strategy->decide(SlotInput{inst.predicted, inst.previous, inst.deployed, 3}, cost);
            auto violations = validate_decision(d, inst.vehicles, cost, g, kind == StrategyKind::centralized);
            EXPECT_TRUE(violations.empty()) << to_string(kind) << " seed " << seed;
        }
    }
}
