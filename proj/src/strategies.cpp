#include "mecanchor/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>

#include "mecanchor/clustering.hpp"
#include "mecanchor/mobility.hpp"

namespace mecanchor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct NamedKind {
    StrategyKind kind;
    const char* name;
};

constexpr NamedKind kNames[] = {
    {StrategyKind::centralized, "centralized"},
    {StrategyKind::static_kmeans, "static_kmeans"},
    {StrategyKind::random, "random"},
    {StrategyKind::greedy_percentile, "greedy_percentile"},
    {StrategyKind::greedy_average, "greedy_average"},
    {StrategyKind::kmeans, "kmeans"},
    {StrategyKind::kmeans_greedy_average, "kmeans_greedy_average"},
    {StrategyKind::modularity_greedy_average, "modularity_greedy_average"},
    {StrategyKind::overhead_aware_greedy_average, "overhead_aware_greedy_average"},
    {StrategyKind::exact_oracle, "exact_oracle"},
};

std::size_t rank_for(double p, std::size_t n) {
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
    return std::clamp<std::size_t>(rank, 1, n);
}

// Deterministic per-slot seed for the randomized strategies.
std::uint64_t slot_seed(std::uint64_t seed, std::int64_t slot, std::uint64_t salt) {
    return mix_seed(seed, static_cast<std::uint64_t>(slot), salt);
}

// Tops up `deployment` to k sites with inactive sites ordered by distance to
// `reference` (then id), or by id when there is no reference.
void pad_deployment(Deployment& deployment, const TopologyGraph& graph, int k,
                    const std::optional<Position>& reference) {
    std::vector<std::pair<double, NodeId>> order;
    for (const auto& site : graph.sites()) {
        if (!deployment.contains(site.id)) {
            double d = reference ? euclidean(*reference, site.position()) : 0.0;
            order.emplace_back(d, site.id);
        }
    }
    std::sort(order.begin(), order.end());
    for (const auto& [d, id] : order) {
        if (deployment.size() >= static_cast<std::size_t>(k)) {
            break;
        }
        deployment.insert(id);
    }
}

// Sum over active sites of count * latency to the cheapest of `candidates`.
NodeId best_site_for_cluster(std::span<const NodeId> cluster, const ActiveSites& active,
                             const std::vector<std::size_t>& count_of, const TopologyGraph& graph) {
    NodeId best = cluster.front();
    double best_total = kInf;
    std::vector<NodeId> ordered(cluster.begin(), cluster.end());
    std::sort(ordered.begin(), ordered.end());
    for (NodeId candidate : ordered) {
        double total = 0.0;
        for (NodeId s : cluster) {
            total += static_cast<double>(count_of[static_cast<std::size_t>(s)]) * graph.latency(s, candidate);
        }
        if (total < best_total) {
            best_total = total;
            best = candidate;
        }
    }
    (void)active;
    return best;
}

class CentralizedStrategy final : public Strategy {
public:
    explicit CentralizedStrategy(const TopologyGraph& graph) : graph_(graph) {}

    StrategyKind kind() const override { return StrategyKind::centralized; }

    Decision decide(const SlotInput& input, const CostModel&) override {
        return {Deployment{}, std::vector<NodeId>(input.predicted.size(), graph_.core())};
    }

private:
    const TopologyGraph& graph_;
};

class StaticKMeansStrategy final : public Strategy {
public:
    StaticKMeansStrategy(const TopologyGraph& graph, int k, std::uint64_t seed)
        : graph_(graph), deployment_(static_kmeans_deployment(graph, k, seed)) {}

    StrategyKind kind() const override { return StrategyKind::static_kmeans; }

    Decision decide(const SlotInput& input, const CostModel&) override {
        return {deployment_, assign_closest(deployment_, input.predicted, graph_)};
    }

private:
    const TopologyGraph& graph_;
    Deployment deployment_;
};

// Strategies whose deployment is a function of the slot input alone,
// followed by closest-anchor assignment.
class ClosestAssignmentStrategy final : public Strategy {
public:
    ClosestAssignmentStrategy(StrategyKind kind, const TopologyGraph& graph, int k, std::uint64_t seed)
        : kind_(kind), graph_(graph), k_(k), seed_(seed) {}

    StrategyKind kind() const override { return kind_; }

    Decision decide(const SlotInput& input, const CostModel&) override {
        Deployment deployment = deploy(input);
        return {deployment, assign_closest(deployment, input.predicted, graph_)};
    }

private:
    Deployment deploy(const SlotInput& input) const {
        switch (kind_) {
            case StrategyKind::random:
                return random_deployment(graph_.edge_count(), k_, slot_seed(seed_, input.slot_index, 1));
            case StrategyKind::greedy_percentile:
                return greedy_deployment(input.predicted, graph_, k_, LatencyMode::p90);
            case StrategyKind::greedy_average:
                return greedy_deployment(input.predicted, graph_, k_, LatencyMode::mean);
            case StrategyKind::kmeans:
                return kmeans_deployment(input.predicted, graph_, k_, slot_seed(seed_, input.slot_index, 2));
            case StrategyKind::kmeans_greedy_average:
                return clustered_greedy_deployment(input.predicted, graph_, k_,
                                                   slot_seed(seed_, input.slot_index, 3), ClusterMethod::kmeans);
            case StrategyKind::modularity_greedy_average:
                return clustered_greedy_deployment(input.predicted, graph_, k_,
                                                   slot_seed(seed_, input.slot_index, 4), ClusterMethod::louvain);
            default:
                throw std::logic_error("not a closest-assignment strategy: " + to_string(kind_));
        }
    }

    StrategyKind kind_;
    const TopologyGraph& graph_;
    int k_;
    std::uint64_t seed_;
};

class OverheadAwareStrategy final : public Strategy {
public:
    explicit OverheadAwareStrategy(const TopologyGraph& graph) : graph_(graph) {}

    StrategyKind kind() const override { return StrategyKind::overhead_aware_greedy_average; }

    Decision decide(const SlotInput& input, const CostModel& cost) override {
        return decide_overhead_aware(input, graph_, cost);
    }

private:
    const TopologyGraph& graph_;
};

class ExactOracleStrategy final : public Strategy {
public:
    explicit ExactOracleStrategy(const TopologyGraph& graph) : graph_(graph) {}

    StrategyKind kind() const override { return StrategyKind::exact_oracle; }

    Decision decide(const SlotInput& input, const CostModel& cost) override {
        return exact_oracle(input, graph_, cost);
    }

private:
    const TopologyGraph& graph_;
};

}  // namespace

std::string to_string(StrategyKind kind) {
    for (const auto& entry : kNames) {
        if (entry.kind == kind) {
            return entry.name;
        }
    }
    return "?";
}

StrategyKind parse_strategy(const std::string& name) {
    for (const auto& entry : kNames) {
        if (name == entry.name) {
            return entry.kind;
        }
    }
    if (name == "overhead_aware") {
        return StrategyKind::overhead_aware_greedy_average;
    }
    throw ConfigError("unknown strategy `" + name + "`");
}

std::vector<StrategyKind> comparison_strategies() {
    std::vector<StrategyKind> kinds;
    for (const auto& entry : kNames) {
        if (entry.kind != StrategyKind::exact_oracle) {
            kinds.push_back(entry.kind);
        }
    }
    return kinds;
}

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, const TopologyGraph& graph, int n_anchor_points,
                                        std::uint64_t seed) {
    if (n_anchor_points < 1 || static_cast<std::size_t>(n_anchor_points) > graph.edge_count()) {
        throw ConfigError("anchor point count " + std::to_string(n_anchor_points) + " outside [1, " +
                          std::to_string(graph.edge_count()) + "]");
    }
    switch (kind) {
        case StrategyKind::centralized:
            return std::make_unique<CentralizedStrategy>(graph);
        case StrategyKind::static_kmeans:
            return std::make_unique<StaticKMeansStrategy>(graph, n_anchor_points, seed);
        case StrategyKind::overhead_aware_greedy_average:
            return std::make_unique<OverheadAwareStrategy>(graph);
        case StrategyKind::exact_oracle:
            if (graph.edge_count() > 12 || n_anchor_points > 4) {
                throw ConfigError("exact_oracle supports at most 12 edge sites and 4 anchor points");
            }
            return std::make_unique<ExactOracleStrategy>(graph);
        default:
            return std::make_unique<ClosestAssignmentStrategy>(kind, graph, n_anchor_points, seed);
    }
}

std::vector<NodeId> assign_closest(const Deployment& deployed, std::span<const NodeId> predicted,
                                   const TopologyGraph& graph) {
    if (deployed.empty()) {
        throw std::invalid_argument("assign_closest: no deployed anchors");
    }
    std::vector<NodeId> closest(graph.edge_count(), kNoNode);
    std::vector<NodeId> anchors(predicted.size());
    for (std::size_t v = 0; v < predicted.size(); ++v) {
        const NodeId site = predicted[v];
        if (site < 0 || static_cast<std::size_t>(site) >= graph.edge_count()) {
            throw std::invalid_argument("assign_closest: vehicle " + std::to_string(v) + " has no attachment");
        }
        NodeId& best = closest[static_cast<std::size_t>(site)];
        if (best == kNoNode) {
            double best_latency = kInf;
            for (NodeId anchor : deployed) {
                double l = graph.latency(site, anchor);
                if (l < best_latency) {
                    best_latency = l;
                    best = anchor;
                }
            }
        }
        anchors[v] = best;
    }
    return anchors;
}

ActiveSites active_sites(std::span<const NodeId> predicted, std::size_t edge_count) {
    std::vector<std::size_t> counts(edge_count, 0);
    for (NodeId site : predicted) {
        if (site < 0 || static_cast<std::size_t>(site) >= edge_count) {
            throw std::invalid_argument("predicted attachment outside the edge sites");
        }
        ++counts[static_cast<std::size_t>(site)];
    }
    ActiveSites active;
    for (std::size_t s = 0; s < edge_count; ++s) {
        if (counts[s] > 0) {
            active.sites.push_back(static_cast<NodeId>(s));
            active.counts.push_back(counts[s]);
        }
    }
    return active;
}

Deployment greedy_deployment(std::span<const NodeId> predicted, const TopologyGraph& graph, int k,
                             LatencyMode metric) {
    if (k < 1 || static_cast<std::size_t>(k) > graph.edge_count()) {
        throw std::invalid_argument("greedy_deployment: k outside [1, E]");
    }
    const ActiveSites active = active_sites(predicted, graph.edge_count());
    const std::size_t a = active.sites.size();
    const std::size_t rank = rank_for(0.9, predicted.size());

    std::vector<double> current(a, kInf);
    std::vector<double> trial(a);
    std::vector<std::pair<double, std::size_t>> sorted(a);
    Deployment deployment;
    for (int iteration = 0; iteration < k; ++iteration) {
        NodeId best = kNoNode;
        double best_p90 = kInf;
        double best_sum = kInf;
        for (std::size_t e = 0; e < graph.edge_count(); ++e) {
            const auto candidate = static_cast<NodeId>(e);
            if (deployment.contains(candidate)) {
                continue;
            }
            double sum = 0.0;
            for (std::size_t i = 0; i < a; ++i) {
                trial[i] = std::min(current[i], graph.latency(active.sites[i], candidate));
                sum += static_cast<double>(active.counts[i]) * trial[i];
            }
            double p90 = 0.0;
            if (metric == LatencyMode::p90 && a > 0) {
                for (std::size_t i = 0; i < a; ++i) {
                    sorted[i] = {trial[i], active.counts[i]};
                }
                std::sort(sorted.begin(), sorted.end());
                std::size_t cumulative = 0;
                for (const auto& [value, count] : sorted) {
                    cumulative += count;
                    if (cumulative >= rank) {
                        p90 = value;
                        break;
                    }
                }
            }
            bool better = metric == LatencyMode::p90
                              ? (p90 < best_p90 || (p90 == best_p90 && sum < best_sum))
                              : sum < best_sum;
            if (best == kNoNode || better) {
                best = candidate;
                best_p90 = p90;
                best_sum = sum;
            }
        }
        deployment.insert(best);
        for (std::size_t i = 0; i < a; ++i) {
            current[i] = std::min(current[i], graph.latency(active.sites[i], best));
        }
    }
    return deployment;
}

Deployment static_kmeans_deployment(const TopologyGraph& graph, int k, std::uint64_t seed) {
    if (k < 1 || static_cast<std::size_t>(k) > graph.edge_count()) {
        throw std::invalid_argument("static_kmeans_deployment: k outside [1, E]");
    }
    std::vector<Position> points;
    for (const auto& site : graph.sites()) {
        points.push_back(site.position());
    }
    auto clusters = kmeans_cluster(points, k, seed);
    Deployment deployment;
    for (const auto& centroid : clusters.centroids) {
        NodeId best = kNoNode;
        double best_distance = kInf;
        for (const auto& site : graph.sites()) {
            if (deployment.contains(site.id)) {
                continue;
            }
            double d = euclidean(centroid, site.position());
            if (d < best_distance) {
                best_distance = d;
                best = site.id;
            }
        }
        deployment.insert(best);
    }
    return deployment;
}

Deployment random_deployment(std::size_t edge_count, int k, std::uint64_t seed) {
    if (k < 1 || static_cast<std::size_t>(k) > edge_count) {
        throw std::invalid_argument("random_deployment: k outside [1, E]");
    }
    std::vector<NodeId> all(edge_count);
    std::iota(all.begin(), all.end(), 0);
    std::vector<NodeId> chosen;
    std::mt19937_64 rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), k, rng);
    return Deployment(chosen.begin(), chosen.end());
}

Deployment kmeans_deployment(std::span<const NodeId> predicted, const TopologyGraph& graph, int k,
                             std::uint64_t seed) {
    if (k < 1 || static_cast<std::size_t>(k) > graph.edge_count()) {
        throw std::invalid_argument("kmeans_deployment: k outside [1, E]");
    }
    const ActiveSites active = active_sites(predicted, graph.edge_count());
    Deployment deployment;
    if (active.sites.size() < static_cast<std::size_t>(k)) {
        deployment.insert(active.sites.begin(), active.sites.end());
        std::optional<Position> reference;
        if (!active.sites.empty()) {
            reference = graph.site(active.sites.back()).position();
        }
        pad_deployment(deployment, graph, k, reference);
        return deployment;
    }
    std::vector<Position> points;
    for (NodeId s : active.sites) {
        points.push_back(graph.site(s).position());
    }
    auto clusters = kmeans_cluster(points, k, seed);
    for (const auto& centroid : clusters.centroids) {
        NodeId best = kNoNode;
        double best_distance = kInf;
        for (NodeId s : active.sites) {
            if (deployment.contains(s)) {
                continue;
            }
            double d = euclidean(centroid, graph.site(s).position());
            if (d < best_distance) {
                best_distance = d;
                best = s;
            }
        }
        deployment.insert(best);
    }
    return deployment;
}

namespace {

std::vector<std::vector<NodeId>> louvain_clusters(const ActiveSites& active, const TopologyGraph& graph,
                                                  int k, std::uint64_t seed) {
    const std::size_t n = active.sites.size();
    std::vector<int> local(graph.edge_count(), -1);
    for (std::size_t i = 0; i < n; ++i) {
        local[static_cast<std::size_t>(active.sites[i])] = static_cast<int>(i);
    }
    std::vector<WeightedEdge> edges;
    for (std::size_t l = 0; l < graph.site_link_count(); ++l) {
        const auto& link = graph.links()[l];
        int a = local[static_cast<std::size_t>(link.a)];
        int b = local[static_cast<std::size_t>(link.b)];
        if (a >= 0 && b >= 0) {
            edges.push_back({a, b, 1.0});
        }
    }
    auto labels = louvain_communities(n, edges);
    std::vector<std::vector<NodeId>> communities(
        static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1);
    for (std::size_t i = 0; i < n; ++i) {
        communities[static_cast<std::size_t>(labels[i])].push_back(active.sites[i]);
    }

    auto by_size = [](const std::vector<NodeId>& lhs, const std::vector<NodeId>& rhs) {
        if (lhs.size() != rhs.size()) {
            return lhs.size() > rhs.size();
        }
        return lhs.front() < rhs.front();
    };
    std::sort(communities.begin(), communities.end(), by_size);

    const auto kk = static_cast<std::size_t>(k);
    if (communities.size() > kk) {
        std::vector<std::vector<NodeId>> kept(communities.begin(), communities.begin() + static_cast<std::ptrdiff_t>(kk));
        for (std::size_t c = kk; c < communities.size(); ++c) {
            std::size_t target = 0;
            double target_distance = kInf;
            for (std::size_t t = 0; t < kept.size(); ++t) {
                for (NodeId u : communities[c]) {
                    for (NodeId w : kept[t]) {
                        double d = graph.latency(u, w);
                        if (d < target_distance) {
                            target_distance = d;
                            target = t;
                        }
                    }
                }
            }
            kept[target].insert(kept[target].end(), communities[c].begin(), communities[c].end());
        }
        communities = std::move(kept);
    }
    std::uint64_t split_round = 0;
    while (communities.size() < kk) {
        std::sort(communities.begin(), communities.end(), by_size);
        auto largest = std::move(communities.front());
        communities.erase(communities.begin());
        std::sort(largest.begin(), largest.end());
        std::vector<Position> points;
        for (NodeId s : largest) {
            points.push_back(graph.site(s).position());
        }
        auto halves = kmeans_cluster(points, 2, mix_seed(seed, split_round++));
        std::vector<NodeId> first;
        std::vector<NodeId> second;
        for (std::size_t i = 0; i < largest.size(); ++i) {
            (halves.labels[i] == 0 ? first : second).push_back(largest[i]);
        }
        communities.push_back(std::move(first));
        communities.push_back(std::move(second));
    }
    for (auto& community : communities) {
        std::sort(community.begin(), community.end());
    }
    std::sort(communities.begin(), communities.end());
    return communities;
}

}  // namespace

std::vector<std::vector<NodeId>> cluster_active_sites(const ActiveSites& active, const TopologyGraph& graph,
                                                      int k, std::uint64_t seed, ClusterMethod method) {
    if (k < 1 || active.sites.size() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("cluster_active_sites: need at least k active sites");
    }
    if (method == ClusterMethod::louvain) {
        return louvain_clusters(active, graph, k, seed);
    }
    std::vector<Position> points;
    for (NodeId s : active.sites) {
        points.push_back(graph.site(s).position());
    }
    auto result = kmeans_cluster(points, k, seed);
    std::vector<std::vector<NodeId>> clusters(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < active.sites.size(); ++i) {
        clusters[static_cast<std::size_t>(result.labels[i])].push_back(active.sites[i]);
    }
    return clusters;
}

Deployment clustered_greedy_deployment(std::span<const NodeId> predicted, const TopologyGraph& graph, int k,
                                       std::uint64_t seed, ClusterMethod method) {
    if (k < 1 || static_cast<std::size_t>(k) > graph.edge_count()) {
        throw std::invalid_argument("clustered_greedy_deployment: k outside [1, E]");
    }
    const ActiveSites active = active_sites(predicted, graph.edge_count());
    Deployment deployment;
    if (active.sites.size() < static_cast<std::size_t>(k)) {
        deployment.insert(active.sites.begin(), active.sites.end());
        std::optional<Position> reference;
        if (!active.sites.empty()) {
            reference = graph.site(active.sites.back()).position();
        }
        pad_deployment(deployment, graph, k, reference);
        return deployment;
    }
    std::vector<std::size_t> count_of(graph.edge_count(), 0);
    for (std::size_t i = 0; i < active.sites.size(); ++i) {
        count_of[static_cast<std::size_t>(active.sites[i])] = active.counts[i];
    }
    for (const auto& cluster : cluster_active_sites(active, graph, k, seed, method)) {
        deployment.insert(best_site_for_cluster(cluster, active, count_of, graph));
    }
    return deployment;
}

namespace {

// Vehicles sharing (predicted site, current anchor) always move together.
struct VehicleGroups {
    std::vector<NodeId> site;
    std::vector<NodeId> previous;
    std::vector<double> count;
    std::vector<std::size_t> of_vehicle;
};

VehicleGroups group_vehicles(const SlotInput& input, const TopologyGraph& graph) {
    if (input.predicted.size() != input.previous.size()) {
        throw std::invalid_argument("slot input: predicted and previous spans differ in size");
    }
    const std::size_t nodes = graph.node_count();
    std::vector<std::size_t> index(graph.edge_count() * nodes, std::numeric_limits<std::size_t>::max());
    VehicleGroups groups;
    groups.of_vehicle.resize(input.predicted.size());
    for (std::size_t v = 0; v < input.predicted.size(); ++v) {
        const NodeId site = input.predicted[v];
        const NodeId previous = input.previous[v];
        if (site < 0 || static_cast<std::size_t>(site) >= graph.edge_count() || previous < 0 ||
            static_cast<std::size_t>(previous) >= nodes) {
            throw std::invalid_argument("slot input: vehicle " + std::to_string(v) +
                                        " has an invalid attachment or anchor");
        }
        auto& slot = index[static_cast<std::size_t>(site) * nodes + static_cast<std::size_t>(previous)];
        if (slot == std::numeric_limits<std::size_t>::max()) {
            slot = groups.site.size();
            groups.site.push_back(site);
            groups.previous.push_back(previous);
            groups.count.push_back(0.0);
        }
        groups.count[slot] += 1.0;
        groups.of_vehicle[v] = slot;
    }
    return groups;
}

// Per-vehicle latency and relocation weights in objective units.
struct UnitCosts {
    double latency;
    double relocation;

    double of(const TopologyGraph& graph, NodeId site, NodeId previous, NodeId anchor) const {
        return latency * graph.latency(site, anchor) + relocation * graph.hops(previous, anchor);
    }
};

UnitCosts unit_costs(const CostModel& cost, std::size_t vehicles) {
    const double v = static_cast<double>(std::max<std::size_t>(vehicles, 1));
    return {cost.weights.alpha1 / (v * cost.norm_f1), cost.weights.alpha3 / cost.norm_f3};
}

double total_score(double latency_sum, double deploy_cost, double relocation_sum, std::size_t vehicles,
                   const CostModel& cost) {
    const double mean = vehicles == 0 ? 0.0 : latency_sum / static_cast<double>(vehicles);
    return scalarize(mean, deploy_cost, relocation_sum, cost);
}

}  // namespace

Decision decide_overhead_aware(const SlotInput& input, const TopologyGraph& graph, const CostModel& cost) {
    const auto groups = group_vehicles(input, graph);
    const std::size_t g_count = groups.site.size();
    const std::size_t vehicles = input.predicted.size();
    const UnitCosts unit = unit_costs(cost, vehicles);
    const int k = cost.n_anchor_points;
    if (k < 1 || static_cast<std::size_t>(k) > graph.edge_count()) {
        throw std::invalid_argument("decide_overhead_aware: anchor point count outside [1, E]");
    }

    std::vector<NodeId> current(groups.previous);
    std::vector<double> keep_cost(g_count);
    for (std::size_t g = 0; g < g_count; ++g) {
        keep_cost[g] = unit.of(graph, groups.site[g], groups.previous[g], current[g]);
    }

    Deployment selected;
    std::size_t kept_deployed = 0;  // |selected ∩ y|
    for (int iteration = 0; iteration < k; ++iteration) {
        NodeId best = kNoNode;
        double best_score = kInf;
        for (std::size_t e = 0; e < graph.edge_count(); ++e) {
            const auto candidate = static_cast<NodeId>(e);
            if (selected.contains(candidate)) {
                continue;
            }
            const bool was_deployed = input.deployed.contains(candidate);
            const std::size_t overlap = kept_deployed + (was_deployed ? 1 : 0);
            const std::size_t deploys = selected.size() + 1 - overlap;
            const std::size_t removals = input.deployed.size() - overlap;
            const double f2 = static_cast<double>(deploys) * cost.a + static_cast<double>(removals) * cost.b;

            double latency_sum = 0.0;
            double relocation_sum = 0.0;
            for (std::size_t g = 0; g < g_count; ++g) {
                const NodeId site = groups.site[g];
                const NodeId previous = groups.previous[g];
                const double relocate = unit.of(graph, site, previous, candidate);
                const NodeId anchor = relocate < keep_cost[g] ? candidate : current[g];
                latency_sum += groups.count[g] * graph.latency(site, anchor);
                relocation_sum += groups.count[g] * graph.hops(previous, anchor);
            }
            const double score = total_score(latency_sum, f2, relocation_sum, vehicles, cost);
            if (score < best_score) {
                best_score = score;
                best = candidate;
            }
        }
        selected.insert(best);
        if (input.deployed.contains(best)) {
            ++kept_deployed;
        }
        for (std::size_t g = 0; g < g_count; ++g) {
            const double relocate = unit.of(graph, groups.site[g], groups.previous[g], best);
            if (relocate < keep_cost[g]) {
                current[g] = best;
                keep_cost[g] = relocate;
            }
        }
    }

    // Groups still holding an anchor that was not re-selected.
    const NodeId core = graph.core();
    for (std::size_t g = 0; g < g_count; ++g) {
        if (current[g] == core || selected.contains(current[g])) {
            continue;
        }
        NodeId closest = kNoNode;
        double closest_latency = kInf;
        for (NodeId anchor : selected) {
            double l = graph.latency(groups.site[g], anchor);
            if (l < closest_latency) {
                closest_latency = l;
                closest = anchor;
            }
        }
        const double via_edge = unit.of(graph, groups.site[g], groups.previous[g], closest);
        const double via_core = unit.of(graph, groups.site[g], groups.previous[g], core);
        current[g] = via_core < via_edge ? core : closest;
    }

    Decision decision{selected, std::vector<NodeId>(vehicles)};
    for (std::size_t v = 0; v < vehicles; ++v) {
        decision.anchors[v] = current[groups.of_vehicle[v]];
    }
    return decision;
}

Decision exact_oracle(const SlotInput& input, const TopologyGraph& graph, const CostModel& cost) {
    const std::size_t e = graph.edge_count();
    const int k = cost.n_anchor_points;
    if (e > 12 || k > 4) {
        throw std::invalid_argument("exact_oracle: instance exceeds 12 edge sites or 4 anchor points");
    }
    if (k < 1 || static_cast<std::size_t>(k) > e) {
        throw std::invalid_argument("exact_oracle: anchor point count outside [1, E]");
    }
    const auto groups = group_vehicles(input, graph);
    const std::size_t g_count = groups.site.size();
    const std::size_t vehicles = input.predicted.size();
    const UnitCosts unit = unit_costs(cost, vehicles);
    const NodeId core = graph.core();

    std::vector<NodeId> subset(static_cast<std::size_t>(k));
    std::iota(subset.begin(), subset.end(), 0);
    std::vector<NodeId> choice(g_count);
    std::vector<NodeId> best_choice;
    Deployment best_deployment;
    double best_score = kInf;
    while (true) {
        Deployment deployment(subset.begin(), subset.end());
        double latency_sum = 0.0;
        double relocation_sum = 0.0;
        for (std::size_t g = 0; g < g_count; ++g) {
            NodeId anchor = core;
            double anchor_cost = unit.of(graph, groups.site[g], groups.previous[g], core);
            for (NodeId candidate : subset) {
                double c = unit.of(graph, groups.site[g], groups.previous[g], candidate);
                if (c < anchor_cost || (c == anchor_cost && candidate < anchor)) {
                    anchor_cost = c;
                    anchor = candidate;
                }
            }
            choice[g] = anchor;
            latency_sum += groups.count[g] * graph.latency(groups.site[g], anchor);
            relocation_sum += groups.count[g] * graph.hops(groups.previous[g], anchor);
        }
        const double f2 = deployment_overhead(input.deployed, deployment, cost.a, cost.b);
        const double score = total_score(latency_sum, f2, relocation_sum, vehicles, cost);
        if (score < best_score) {
            best_score = score;
            best_choice = choice;
            best_deployment = std::move(deployment);
        }

        // Next combination in lexicographic order.
        int i = k - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] == static_cast<NodeId>(e) - k + i) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++subset[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
        }
    }

    Decision decision{best_deployment, std::vector<NodeId>(vehicles)};
    for (std::size_t v = 0; v < vehicles; ++v) {
        decision.anchors[v] = best_choice[groups.of_vehicle[v]];
    }
    return decision;
}

}  // namespace mecanchor
