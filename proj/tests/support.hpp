#pragma once

// Shared fixtures for unit, property and acceptance tests: small graphs,
// random instances, and naive-loop re-implementations of the evaluators.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mecanchor/objective.hpp"
#include "mecanchor/strategies.hpp"
#include "mecanchor/synthetic.hpp"
#include "mecanchor/topology.hpp"

namespace testing_support {

using namespace mecanchor;

// Path e0 - e1 - ... - e(n-1), unit weights, core hung off `attach`.
inline TopologyGraph path_graph(int n, NodeId attach = 0) {
    std::vector<Site> sites;
    std::vector<Link> links;
    for (int i = 0; i < n; ++i) {
        sites.push_back({i, 100.0 * i, 0.0});
        if (i > 0) {
            links.push_back({i - 1, i, 1.0});
        }
    }
    return TopologyGraph(sites, links, attach, 1.0);
}

inline TopologyGraph random_graph(std::mt19937_64& rng, int edge_sites) {
    std::uniform_real_distribution<double> coordinate(0.0, 1500.0);
    std::vector<Site> sites;
    for (int i = 0; i < edge_sites; ++i) {
        sites.push_back({i, coordinate(rng), coordinate(rng)});
    }
    return build_graph(sites, GraphOptions{});
}

struct Instance {
    std::shared_ptr<TopologyGraph> graph;
    std::vector<std::string> vehicles;
    std::vector<NodeId> connections;
    std::vector<NodeId> predicted;
    std::vector<NodeId> previous;  // anchors, within deployed or core
    Deployment deployed;
    int k = 1;
};

// Random graph, deployment of k sites, vehicles anchored in it or on the core.
inline Instance random_instance(std::uint64_t seed, int max_sites, int max_k, int max_vehicles) {
    std::mt19937_64 rng(seed);
    Instance inst;
    const int e = std::uniform_int_distribution<int>(2, max_sites)(rng);
    inst.graph = std::make_shared<TopologyGraph>(random_graph(rng, e));
    inst.k = std::uniform_int_distribution<int>(1, std::min(max_k, e))(rng);

    std::vector<NodeId> all(static_cast<std::size_t>(e));
    for (int i = 0; i < e; ++i) {
        all[static_cast<std::size_t>(i)] = i;
    }
    std::shuffle(all.begin(), all.end(), rng);
    inst.deployed.insert(all.begin(), all.begin() + inst.k);
    std::vector<NodeId> anchors(inst.deployed.begin(), inst.deployed.end());
    anchors.push_back(inst.graph->core());

    const int v = std::uniform_int_distribution<int>(1, max_vehicles)(rng);
    std::uniform_int_distribution<int> site(0, e - 1);
    std::uniform_int_distribution<std::size_t> pick(0, anchors.size() - 1);
    for (int i = 0; i < v; ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "v%03d", i);
        inst.vehicles.emplace_back(name);
        inst.connections.push_back(site(rng));
        inst.predicted.push_back(site(rng));
        inst.previous.push_back(anchors[pick(rng)]);
    }
    return inst;
}

// Unweighted BFS distances from one node.
inline std::vector<int> bfs(const TopologyGraph& graph, NodeId source) {
    std::vector<int> dist(graph.node_count(), -1);
    std::deque<NodeId> queue{source};
    dist[static_cast<std::size_t>(source)] = 0;
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (const auto& [w, weight] : graph.adjacency()[static_cast<std::size_t>(u)]) {
            (void)weight;
            if (dist[static_cast<std::size_t>(w)] < 0) {
                dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

// ---- naive evaluators ------------------------------------------------------

inline double naive_p90(const std::vector<NodeId>& x, const std::vector<NodeId>& z, const TopologyGraph& g) {
    if (x.empty()) {
        return 0.0;
    }
    std::vector<double> l;
    for (std::size_t v = 0; v < x.size(); ++v) {
        l.push_back(g.latency(x[v], z[v]));
    }
    std::sort(l.begin(), l.end());
    // ceil(0.9 n) in integers
    std::size_t rank = (9 * l.size() + 9) / 10;
    return l[rank - 1];
}

inline double naive_mean(const std::vector<NodeId>& x, const std::vector<NodeId>& z, const TopologyGraph& g) {
    if (x.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t v = 0; v < x.size(); ++v) {
        total += g.latency(x[v], z[v]);
    }
    return total / static_cast<double>(x.size());
}

inline double naive_f2(const Deployment& y, const Deployment& y_next, double a, double b, std::size_t nodes) {
    double total = 0.0;
    for (NodeId i = 0; i < static_cast<NodeId>(nodes); ++i) {
        const bool before = y.count(i) > 0;
        const bool after = y_next.count(i) > 0;
        if (after && !before) {
            total += a;
        } else if (before && !after) {
            total += b;
        }
    }
    return total;
}

inline double naive_f3(const std::vector<NodeId>& z, const std::vector<NodeId>& z_next, const TopologyGraph& g) {
    double total = 0.0;
    for (std::size_t v = 0; v < z.size(); ++v) {
        total += g.hops(z[v], z_next[v]);
    }
    return total;
}

inline double naive_scalarized(double f1, double f2, double f3, const Weights& w, const TopologyGraph& g,
                               double a, double b, std::size_t vehicles) {
    int max_o = 0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        for (std::size_t j = 0; j < g.node_count(); ++j) {
            max_o = std::max(max_o, g.hops(static_cast<NodeId>(i), static_cast<NodeId>(j)));
        }
    }
    double diameter = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        for (std::size_t j = 0; j < g.node_count(); ++j) {
            diameter = std::max(diameter, g.latency(static_cast<NodeId>(i), static_cast<NodeId>(j)));
        }
    }
    const double n2 = static_cast<double>(g.node_count()) * std::max(a, b);
    const double n3 = static_cast<double>(std::max<std::size_t>(vehicles, 1)) * max_o;
    return w.alpha1 * f1 / diameter + w.alpha2 * f2 / n2 + w.alpha3 * f3 / n3;
}

// Planning objective (mean latency) from scratch.
inline double naive_planning(const Decision& d, const Instance& inst, const Weights& w, double a = 1.0,
                             double b = 0.1) {
    const auto& g = *inst.graph;
    return naive_scalarized(naive_mean(inst.predicted, d.anchors, g),
                            naive_f2(inst.deployed, d.deployed_next, a, b, g.node_count()),
                            naive_f3(inst.previous, d.anchors, g), w, g, a, b, inst.vehicles.size());
}

}  // namespace testing_support
