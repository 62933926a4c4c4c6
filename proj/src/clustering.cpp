#include "mecanchor/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace mecanchor {

namespace {

double squared(const Position& a, const Position& b) {
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

std::vector<Position> seed_plus_plus(std::span<const Position> points, int k, std::mt19937_64& rng) {
    const std::size_t n = points.size();
    std::vector<Position> centers;
    std::vector<bool> chosen(n, false);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::size_t index = first(rng);
    centers.push_back(points[index]);
    chosen[index] = true;

    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) {
        nearest[i] = squared(points[i], centers.back());
    }
    while (static_cast<int>(centers.size()) < k) {
        double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
        if (total > 0.0) {
            std::uniform_real_distribution<double> pick(0.0, total);
            double target = pick(rng);
            index = n - 1;
            double running = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                running += nearest[i];
                if (nearest[i] > 0.0 && running >= target) {
                    index = i;
                    break;
                }
            }
            while (nearest[index] == 0.0 && index > 0) {
                --index;
            }
        } else {
            // Every point coincides with a center already.
            index = 0;
            while (index < n && chosen[index]) {
                ++index;
            }
        }
        centers.push_back(points[index]);
        chosen[index] = true;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared(points[i], centers.back()));
        }
    }
    return centers;
}

}  // namespace

KMeansResult kmeans_cluster(std::span<const Position> points, int k, std::uint64_t seed) {
    if (k < 1) {
        throw std::invalid_argument("kmeans_cluster: k must be at least 1");
    }
    if (points.size() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("kmeans_cluster: " + std::to_string(points.size()) +
                                    " points cannot form " + std::to_string(k) + " clusters");
    }
    const std::size_t n = points.size();
    const auto kk = static_cast<std::size_t>(k);
    std::mt19937_64 rng(seed);

    KMeansResult result;
    result.centroids = seed_plus_plus(points, k, rng);
    result.labels.assign(n, 0);
    std::vector<std::size_t> counts(kk);

    for (int iteration = 1; iteration <= 100; ++iteration) {
        result.iterations = iteration;
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_distance = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < kk; ++c) {
                double d = squared(points[i], result.centroids[c]);
                if (d < best_distance) {
                    best_distance = d;
                    best = static_cast<int>(c);
                }
            }
            result.labels[i] = best;
            ++counts[static_cast<std::size_t>(best)];
        }

        for (std::size_t c = 0; c < kk; ++c) {
            if (counts[c] != 0) {
                continue;
            }
            std::size_t farthest = n;
            double farthest_distance = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                auto label = static_cast<std::size_t>(result.labels[i]);
                if (counts[label] < 2) {
                    continue;
                }
                double d = squared(points[i], result.centroids[label]);
                if (d > farthest_distance) {
                    farthest_distance = d;
                    farthest = i;
                }
            }
            --counts[static_cast<std::size_t>(result.labels[farthest])];
            result.labels[farthest] = static_cast<int>(c);
            counts[c] = 1;
            result.centroids[c] = points[farthest];
        }

        std::vector<Position> sums(kk);
        for (std::size_t i = 0; i < n; ++i) {
            auto& sum = sums[static_cast<std::size_t>(result.labels[i])];
            sum.x += points[i].x;
            sum.y += points[i].y;
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < kk; ++c) {
            Position updated{sums[c].x / static_cast<double>(counts[c]), sums[c].y / static_cast<double>(counts[c])};
            shift = std::max(shift, std::sqrt(squared(updated, result.centroids[c])));
            result.centroids[c] = updated;
        }
        if (shift < 1e-6) {
            break;
        }
    }
    return result;
}

namespace {

struct LevelGraph {
    std::vector<std::map<int, double>> neighbors;  // no self entries
    std::vector<double> self_loops;                // internal edge weight
    std::vector<double> degree;
};

LevelGraph make_level(std::size_t n, std::span<const WeightedEdge> edges) {
    LevelGraph graph{std::vector<std::map<int, double>>(n), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (const auto& edge : edges) {
        if (edge.a == edge.b) {
            graph.self_loops[static_cast<std::size_t>(edge.a)] += edge.weight;
        } else {
            graph.neighbors[static_cast<std::size_t>(edge.a)][edge.b] += edge.weight;
            graph.neighbors[static_cast<std::size_t>(edge.b)][edge.a] += edge.weight;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        graph.degree[i] = 2.0 * graph.self_loops[i];
        for (const auto& [j, w] : graph.neighbors[i]) {
            graph.degree[i] += w;
        }
    }
    return graph;
}

// One local-moving phase. Returns true if any node changed community.
bool local_moves(const LevelGraph& graph, double two_m, std::vector<int>& community) {
    const std::size_t n = graph.degree.size();
    std::vector<double> totals(graph.degree);
    std::iota(community.begin(), community.end(), 0);
    bool improved = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            const int own = community[i];
            const double ki = graph.degree[i];
            std::map<int, double> to_community;
            for (const auto& [j, w] : graph.neighbors[i]) {
                to_community[community[static_cast<std::size_t>(j)]] += w;
            }
            totals[static_cast<std::size_t>(own)] -= ki;
            int best = own;
            double best_gain = to_community[own] - totals[static_cast<std::size_t>(own)] * ki / two_m;
            for (const auto& [c, w] : to_community) {
                double gain = w - totals[static_cast<std::size_t>(c)] * ki / two_m;
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best = c;
                }
            }
            totals[static_cast<std::size_t>(best)] += ki;
            if (best != own) {
                community[i] = best;
                moved = true;
                improved = true;
            }
        }
    }
    return improved;
}

std::vector<int> renumber_by_smallest(std::span<const int> labels) {
    std::map<int, int> mapping;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = mapping.emplace(labels[i], static_cast<int>(mapping.size()));
        out[i] = it->second;
    }
    return out;
}

}  // namespace

std::vector<int> louvain_communities(std::size_t node_count, std::span<const WeightedEdge> edges) {
    if (node_count == 0) {
        throw std::invalid_argument("louvain_communities: empty graph");
    }
    std::vector<int> labels(node_count);
    std::iota(labels.begin(), labels.end(), 0);

    std::vector<WeightedEdge> level_edges(edges.begin(), edges.end());
    std::size_t level_nodes = node_count;
    while (true) {
        LevelGraph graph = make_level(level_nodes, level_edges);
        double two_m = std::accumulate(graph.degree.begin(), graph.degree.end(), 0.0);
        if (two_m <= 0.0) {
            break;
        }
        std::vector<int> community(level_nodes);
        if (!local_moves(graph, two_m, community)) {
            break;
        }
        community = renumber_by_smallest(community);
        for (auto& label : labels) {
            label = community[static_cast<std::size_t>(label)];
        }
        std::size_t next_nodes = static_cast<std::size_t>(*std::max_element(community.begin(), community.end())) + 1;
        std::map<std::pair<int, int>, double> merged;
        for (std::size_t i = 0; i < level_nodes; ++i) {
            int ci = community[i];
            if (graph.self_loops[i] > 0.0) {
                merged[{ci, ci}] += graph.self_loops[i];
            }
            for (const auto& [j, w] : graph.neighbors[i]) {
                if (static_cast<std::size_t>(j) < i) {
                    continue;
                }
                int cj = community[static_cast<std::size_t>(j)];
                merged[{std::min(ci, cj), std::max(ci, cj)}] += w;
            }
        }
        level_edges.clear();
        for (const auto& [key, w] : merged) {
            level_edges.push_back({key.first, key.second, w});
        }
        if (next_nodes == level_nodes) {
            break;
        }
        level_nodes = next_nodes;
    }
    return renumber_by_smallest(labels);
}

double modularity(std::size_t node_count, std::span<const WeightedEdge> edges, std::span<const int> labels) {
    LevelGraph graph = make_level(node_count, edges);
    double two_m = std::accumulate(graph.degree.begin(), graph.degree.end(), 0.0);
    if (two_m <= 0.0) {
        return 0.0;
    }
    std::map<int, double> internal;
    std::map<int, double> totals;
    for (std::size_t i = 0; i < node_count; ++i) {
        totals[labels[i]] += graph.degree[i];
        internal[labels[i]] += 2.0 * graph.self_loops[i];
        for (const auto& [j, w] : graph.neighbors[i]) {
            if (labels[static_cast<std::size_t>(j)] == labels[i]) {
                internal[labels[i]] += w;
            }
        }
    }
    double q = 0.0;
    for (const auto& [c, total] : totals) {
        q += internal[c] / two_m - (total / two_m) * (total / two_m);
    }
    return q;
}

}  // namespace mecanchor
