#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mecanchor/types.hpp"

namespace mecanchor {

struct Site {
    NodeId id = 0;
    double x = 0.0;
    double y = 0.0;

    Position position() const { return {x, y}; }
};

struct Link {
    NodeId a = 0;
    NodeId b = 0;
    double weight = 1.0;
};

struct GraphOptions {
    double d_threshold = 500.0;
    std::optional<NodeId> core_attach;  // default: graph center
    double core_link_weight = 1.0;
    double site_link_weight = 1.0;
};

/// Backhaul graph over edge sites plus the core node.
///
/// Immutable after construction. Node ids 0..E-1 are the sites in input
/// order; node E is the core. Latency (weighted shortest path) and hop
/// counts along those shortest paths are computed once for all pairs.
class TopologyGraph {
public:
    TopologyGraph(std::vector<Site> sites, std::vector<Link> links, NodeId core_attach,
                  double core_link_weight);

    std::size_t edge_count() const { return sites_.size(); }
    std::size_t node_count() const { return sites_.size() + 1; }
    NodeId core() const { return static_cast<NodeId>(sites_.size()); }
    NodeId core_attach() const { return core_attach_; }

    const std::vector<Site>& sites() const { return sites_; }
    const Site& site(NodeId id) const { return sites_.at(static_cast<std::size_t>(id)); }

    /// All links, core link last.
    const std::vector<Link>& links() const { return links_; }
    std::size_t site_link_count() const { return links_.size() - 1; }

    const std::vector<std::vector<std::pair<NodeId, double>>>& adjacency() const {
        return adjacency_;
    }

    double latency(NodeId i, NodeId j) const {
        return latency_(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    int hops(NodeId i, NodeId j) const {
        return hops_(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }

    const SquareMatrix<double>& latency_matrix() const { return latency_; }
    const SquareMatrix<int>& relocation_matrix() const { return hops_; }

    double diameter() const { return diameter_; }
    int max_relocation() const { return max_hops_; }

    /// Mean hop distance over unordered pairs of distinct edge sites.
    double mean_site_hops() const;

    std::size_t duplicate_coordinate_pairs() const { return duplicate_pairs_; }
    void set_duplicate_coordinate_pairs(std::size_t n) { duplicate_pairs_ = n; }

private:
    std::vector<Site> sites_;
    std::vector<Link> links_;
    std::vector<std::vector<std::pair<NodeId, double>>> adjacency_;
    NodeId core_attach_ = 0;
    SquareMatrix<double> latency_;
    SquareMatrix<int> hops_;
    double diameter_ = 0.0;
    int max_hops_ = 0;
    std::size_t duplicate_pairs_ = 0;
};

struct AllPairs {
    SquareMatrix<double> latency;
    SquareMatrix<int> hops;  // links on the chosen shortest path
    double diameter = 0.0;
};

/// Dijkstra from every node. Among equal-latency paths the one with fewest
/// links defines the hop count. Throws if the graph is disconnected.
AllPairs all_pairs_latency(std::size_t node_count,
                           const std::vector<std::vector<std::pair<NodeId, double>>>& adjacency);

/// Links every site pair closer than the threshold, joins components
/// largest-with-second-largest through their closest cross pair until
/// connected, then hangs the core off `core_attach` (or the graph center).
TopologyGraph build_graph(std::vector<Site> sites, const GraphOptions& options = {});

/// Hop counts o_ij along shortest paths, core included.
const SquareMatrix<int>& relocation_cost_matrix(const TopologyGraph& graph);

/// Site with minimum eccentricity over the site-only links (ties: lowest id).
NodeId graph_center(std::size_t site_count, std::span<const Link> site_links);

/// Reads `id x y` records, whitespace- or comma-separated, `#` comments.
std::vector<Site> read_sites(std::istream& in);
std::vector<Site> read_sites_file(const std::string& path);

void write_edges_csv(std::ostream& out, const TopologyGraph& graph);
void write_sites_csv(std::ostream& out, const TopologyGraph& graph);

}  // namespace mecanchor
