#include "mecanchor/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

#include "mecanchor/csv.hpp"

namespace mecanchor {

double euclidean(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

using Adjacency = std::vector<std::vector<std::pair<NodeId, double>>>;

Adjacency make_adjacency(std::size_t node_count, std::span<const Link> links) {
    Adjacency adjacency(node_count);
    for (const auto& link : links) {
        adjacency[static_cast<std::size_t>(link.a)].emplace_back(link.b, link.weight);
        adjacency[static_cast<std::size_t>(link.b)].emplace_back(link.a, link.weight);
    }
    for (auto& row : adjacency) {
        std::sort(row.begin(), row.end());
    }
    return adjacency;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t v) {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        if (size_[a] < size_[b]) {
            std::swap(a, b);
        }
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

// Components as ascending member lists, ordered by size desc then smallest id.
std::vector<std::vector<NodeId>> ranked_components(DisjointSets& sets, std::size_t n) {
    std::vector<std::vector<NodeId>> by_root(n);
    for (std::size_t v = 0; v < n; ++v) {
        by_root[sets.find(v)].push_back(static_cast<NodeId>(v));
    }
    std::vector<std::vector<NodeId>> components;
    for (auto& members : by_root) {
        if (!members.empty()) {
            components.push_back(std::move(members));
        }
    }
    std::sort(components.begin(), components.end(), [](const auto& lhs, const auto& rhs) {
        if (lhs.size() != rhs.size()) {
            return lhs.size() > rhs.size();
        }
        return lhs.front() < rhs.front();
    });
    return components;
}

}  // namespace

AllPairs all_pairs_latency(std::size_t node_count, const Adjacency& adjacency) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    AllPairs result{SquareMatrix<double>(node_count, kInf), SquareMatrix<int>(node_count, 0), 0.0};

    using Entry = std::tuple<double, int, NodeId>;
    std::vector<double> dist(node_count);
    std::vector<int> hops(node_count);
    for (std::size_t source = 0; source < node_count; ++source) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(hops.begin(), hops.end(), std::numeric_limits<int>::max());
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
        dist[source] = 0.0;
        hops[source] = 0;
        frontier.emplace(0.0, 0, static_cast<NodeId>(source));
        while (!frontier.empty()) {
            auto [d, h, u] = frontier.top();
            frontier.pop();
            auto ui = static_cast<std::size_t>(u);
            if (d > dist[ui] || (d == dist[ui] && h > hops[ui])) {
                continue;
            }
            for (const auto& [v, w] : adjacency[ui]) {
                auto vi = static_cast<std::size_t>(v);
                double nd = d + w;
                int nh = h + 1;
                if (nd < dist[vi] || (nd == dist[vi] && nh < hops[vi])) {
                    dist[vi] = nd;
                    hops[vi] = nh;
                    frontier.emplace(nd, nh, v);
                }
            }
        }
        for (std::size_t target = 0; target < node_count; ++target) {
            if (dist[target] == kInf) {
                throw std::invalid_argument("graph is disconnected: node " +
                                            std::to_string(target) + " unreachable from node " +
                                            std::to_string(source));
            }
            result.latency(source, target) = dist[target];
            result.hops(source, target) = hops[target];
            result.diameter = std::max(result.diameter, dist[target]);
        }
    }
    return result;
}

TopologyGraph::TopologyGraph(std::vector<Site> sites, std::vector<Link> links, NodeId core_attach,
                             double core_link_weight)
    : sites_(std::move(sites)), links_(std::move(links)), core_attach_(core_attach) {
    if (sites_.empty()) {
        throw std::invalid_argument("topology needs at least one site");
    }
    if (core_attach_ < 0 || static_cast<std::size_t>(core_attach_) >= sites_.size()) {
        throw std::invalid_argument("core attach site " + std::to_string(core_attach_) +
                                    " out of range");
    }
    if (!(core_link_weight > 0.0)) {
        throw std::invalid_argument("core link weight must be positive");
    }
    for (const auto& link : links_) {
        if (!(link.weight > 0.0)) {
            throw std::invalid_argument("link weights must be positive");
        }
    }
    links_.push_back({core_attach_, core(), core_link_weight});
    adjacency_ = make_adjacency(node_count(), links_);
    auto pairs = all_pairs_latency(node_count(), adjacency_);
    latency_ = std::move(pairs.latency);
    hops_ = std::move(pairs.hops);
    diameter_ = pairs.diameter;
    max_hops_ = *std::max_element(hops_.data().begin(), hops_.data().end());
}

double TopologyGraph::mean_site_hops() const {
    const std::size_t e = edge_count();
    if (e < 2) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < e; ++i) {
        for (std::size_t j = i + 1; j < e; ++j) {
            total += hops_(i, j);
        }
    }
    return total / (static_cast<double>(e) * static_cast<double>(e - 1) / 2.0);
}

NodeId graph_center(std::size_t site_count, std::span<const Link> site_links) {
    auto pairs = all_pairs_latency(site_count, make_adjacency(site_count, site_links));
    NodeId best = 0;
    double best_eccentricity = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < site_count; ++i) {
        double eccentricity = 0.0;
        for (std::size_t j = 0; j < site_count; ++j) {
            eccentricity = std::max(eccentricity, pairs.latency(i, j));
        }
        if (eccentricity < best_eccentricity) {
            best_eccentricity = eccentricity;
            best = static_cast<NodeId>(i);
        }
    }
    return best;
}

TopologyGraph build_graph(std::vector<Site> sites, const GraphOptions& options) {
    if (sites.empty()) {
        throw std::invalid_argument("site list is empty");
    }
    if (!(options.d_threshold > 0.0)) {
        throw std::invalid_argument("neighborhood threshold must be positive");
    }
    std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (sites[i].id != static_cast<NodeId>(i)) {
            throw std::invalid_argument("site ids must be unique and contiguous from 0 (got " +
                                        std::to_string(sites[i].id) + " at position " +
                                        std::to_string(i) + ")");
        }
        if (!std::isfinite(sites[i].x) || !std::isfinite(sites[i].y)) {
            throw std::invalid_argument("site " + std::to_string(i) + " has a non-finite coordinate");
        }
    }

    const std::size_t n = sites.size();
    std::vector<Link> links;
    std::size_t duplicates = 0;
    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = euclidean(sites[i].position(), sites[j].position());
            if (d == 0.0) {
                ++duplicates;
            }
            if (d < options.d_threshold) {
                links.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), options.site_link_weight});
                sets.unite(i, j);
            }
        }
    }

    for (auto components = ranked_components(sets, n); components.size() > 1;
         components = ranked_components(sets, n)) {
        const auto& largest = components[0];
        const auto& second = components[1];
        auto best = std::make_tuple(std::numeric_limits<double>::infinity(), NodeId{0}, NodeId{0});
        for (NodeId u : largest) {
            for (NodeId v : second) {
                double d = euclidean(sites[static_cast<std::size_t>(u)].position(),
                                     sites[static_cast<std::size_t>(v)].position());
                auto candidate = std::make_tuple(d, std::min(u, v), std::max(u, v));
                if (candidate < best) {
                    best = candidate;
                }
            }
        }
        auto [d, u, v] = best;
        links.push_back({u, v, options.site_link_weight});
        sets.unite(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    }

    NodeId attach = options.core_attach.has_value() ? *options.core_attach : graph_center(n, links);
    TopologyGraph graph(std::move(sites), std::move(links), attach, options.core_link_weight);
    graph.set_duplicate_coordinate_pairs(duplicates);
    return graph;
}

const SquareMatrix<int>& relocation_cost_matrix(const TopologyGraph& graph) {
    return graph.relocation_matrix();
}

std::vector<Site> read_sites(std::istream& in) {
    std::vector<Site> sites;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string token; fields >> token;) {
            tokens.push_back(token);
        }
        Site site;
        try {
            if (tokens.size() != 3) {
                throw std::invalid_argument("expected 3 fields");
            }
            std::size_t used = 0;
            site.id = std::stoi(tokens[0], &used);
            if (used != tokens[0].size()) {
                throw std::invalid_argument("bad id");
            }
            site.x = std::stod(tokens[1], &used);
            if (used != tokens[1].size()) {
                throw std::invalid_argument("bad x");
            }
            site.y = std::stod(tokens[2], &used);
            if (used != tokens[2].size()) {
                throw std::invalid_argument("bad y");
            }
        } catch (const std::exception&) {
            if (sites.empty() && tokens.size() == 3 && tokens[0] == "id") {
                continue;  // header
            }
            throw IoError("stations line " + std::to_string(line_number) +
                          ": expected `id x y`, got: " + line);
        }
        sites.push_back(site);
    }
    if (in.bad()) {
        throw IoError("failed reading stations stream");
    }
    return sites;
}

std::vector<Site> read_sites_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open stations file: " + path);
    }
    return read_sites(in);
}

void write_edges_csv(std::ostream& out, const TopologyGraph& graph) {
    csv::Writer writer(out);
    writer.header({"i", "j", "w"});
    for (const auto& link : graph.links()) {
        writer.field(link.a).field(link.b).field(link.weight).end_row();
    }
}

void write_sites_csv(std::ostream& out, const TopologyGraph& graph) {
    csv::Writer writer(out);
    writer.header({"id", "x", "y", "is_core"});
    for (const auto& site : graph.sites()) {
        writer.field(site.id).field(site.x).field(site.y).field(0).end_row();
    }
    // The core has no radio position; it is reported at its attach site.
    const auto& attach = graph.site(graph.core_attach());
    writer.field(graph.core()).field(attach.x).field(attach.y).field(1).end_row();
}

}  // namespace mecanchor
