#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mecanchor/objective.hpp"
#include "mecanchor/topology.hpp"

namespace mecanchor {

enum class StrategyKind {
    centralized,
    static_kmeans,
    random,
    greedy_percentile,
    greedy_average,
    kmeans,
    kmeans_greedy_average,
    modularity_greedy_average,
    overhead_aware_greedy_average,
    exact_oracle,
};

std::string to_string(StrategyKind kind);
StrategyKind parse_strategy(const std::string& name);

/// The nine deployment strategies compared in experiments (no oracle).
std::vector<StrategyKind> comparison_strategies();

/// What a strategy sees at the start of a slot. Spans are indexed by the
/// slot's vehicles in ascending id order.
struct SlotInput {
    std::span<const NodeId> predicted;  // X-hat: predicted attachment site
    std::span<const NodeId> previous;   // Z: current anchor (core for new vehicles)
    const Deployment& deployed;         // y
    std::int64_t slot_index = 0;
};

class Strategy {
public:
    virtual ~Strategy() = default;

    virtual StrategyKind kind() const = 0;
    virtual Decision decide(const SlotInput& input, const CostModel& cost) = 0;
};

/// `graph` must outlive the strategy.
std::unique_ptr<Strategy> make_strategy(StrategyKind kind, const TopologyGraph& graph, int n_anchor_points,
                                        std::uint64_t seed);

/// Closest deployed edge anchor by latency from the attached site; ties go to
/// the lowest site id. Throws on an empty deployment.
std::vector<NodeId> assign_closest(const Deployment& deployed, std::span<const NodeId> predicted,
                                   const TopologyGraph& graph);

/// Greedy site additions minimizing the p90 (ties: mean, then id) or the mean
/// latency of closest-anchor assignment.
Deployment greedy_deployment(std::span<const NodeId> predicted, const TopologyGraph& graph, int k,
                             LatencyMode metric);

Deployment static_kmeans_deployment(const TopologyGraph& graph, int k, std::uint64_t seed);

Deployment random_deployment(std::size_t edge_count, int k, std::uint64_t seed);

/// Sites with at least one attached vehicle, ascending, with vehicle counts.
struct ActiveSites {
    std::vector<NodeId> sites;
    std::vector<std::size_t> counts;
};
ActiveSites active_sites(std::span<const NodeId> predicted, std::size_t edge_count);

Deployment kmeans_deployment(std::span<const NodeId> predicted, const TopologyGraph& graph, int k,
                             std::uint64_t seed);

enum class ClusterMethod { kmeans, louvain };

/// Partition of the active sites into exactly k clusters (k <= #active).
std::vector<std::vector<NodeId>> cluster_active_sites(const ActiveSites& active, const TopologyGraph& graph,
                                                      int k, std::uint64_t seed, ClusterMethod method);

Deployment clustered_greedy_deployment(std::span<const NodeId> predicted, const TopologyGraph& graph, int k,
                                       std::uint64_t seed, ClusterMethod method);

/// Overhead-aware greedy average over vehicle groups sharing
/// (predicted site, current anchor).
Decision decide_overhead_aware(const SlotInput& input, const TopologyGraph& graph, const CostModel& cost);

/// Exhaustive search over k-subsets minimizing the planning objective.
/// Refuses more than 12 edge sites or more than 4 anchor points.
Decision exact_oracle(const SlotInput& input, const TopologyGraph& graph, const CostModel& cost);

}  // namespace mecanchor
