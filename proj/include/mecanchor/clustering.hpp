#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mecanchor/types.hpp"

namespace mecanchor {

struct KMeansResult {
    std::vector<int> labels;  // cluster per point, every cluster non-empty
    std::vector<Position> centroids;
    int iterations = 0;
};

/// Lloyd iterations from k-means++ seeding. Stops after 100 iterations or
/// once no centroid moves by 1e-6 m. An empty cluster is reseeded with the
/// point farthest from its own centroid.
KMeansResult kmeans_cluster(std::span<const Position> points, int k, std::uint64_t seed);

struct WeightedEdge {
    int a = 0;
    int b = 0;
    double weight = 1.0;
};

/// Louvain modularity maximization (resolution 1), nodes visited in
/// ascending order. Labels are 0.. in order of each community's smallest node.
std::vector<int> louvain_communities(std::size_t node_count, std::span<const WeightedEdge> edges);

/// Modularity of a labeling, for checks.
double modularity(std::size_t node_count, std::span<const WeightedEdge> edges, std::span<const int> labels);

}  // namespace mecanchor
