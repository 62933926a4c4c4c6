#include "mecanchor/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mecanchor {

void Weights::validate() const {
    if (alpha1 < 0.0 || alpha2 < 0.0 || alpha3 < 0.0) {
        throw ConfigError("alpha weights must be non-negative");
    }
    if (std::abs(alpha1 + alpha2 + alpha3 - 1.0) > 1e-9) {
        throw ConfigError("alpha weights must sum to 1");
    }
}

CostModel CostModel::make(const TopologyGraph& graph, const Weights& weights, double a, double b,
                          int n_anchor_points, std::size_t vehicle_count) {
    CostModel cost;
    cost.a = a;
    cost.b = b;
    cost.weights = weights;
    cost.n_anchor_points = n_anchor_points;
    cost.norm_f1 = graph.diameter();
    cost.norm_f2 = static_cast<double>(graph.node_count()) * std::max(a, b);
    cost.norm_f3 = static_cast<double>(std::max<std::size_t>(vehicle_count, 1)) * graph.max_relocation();
    return cost;
}

void CostModel::validate(std::size_t edge_count) const {
    weights.validate();
    if (a < 0.0 || b < 0.0) {
        throw ConfigError("deploy and removal costs must be non-negative");
    }
    if (!(norm_f1 > 0.0) || !(norm_f2 > 0.0) || !(norm_f3 > 0.0)) {
        throw ConfigError("objective normalizers must be positive");
    }
    if (n_anchor_points < 1 || static_cast<std::size_t>(n_anchor_points) > edge_count) {
        throw ConfigError("anchor point count " + std::to_string(n_anchor_points) + " outside [1, " +
                          std::to_string(edge_count) + "]");
    }
}

double nearest_rank_percentile(std::vector<double> values, double p) {
    if (values.empty()) {
        return 0.0;
    }
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size()) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
    return values[rank - 1];
}

double latency_objective(std::span<const NodeId> connections, std::span<const NodeId> anchors,
                         const SquareMatrix<double>& latency, LatencyMode mode) {
    if (connections.size() != anchors.size()) {
        throw std::invalid_argument("latency_objective: " + std::to_string(anchors.size()) +
                                    " assignments for " + std::to_string(connections.size()) +
                                    " connected vehicles");
    }
    const auto n = static_cast<NodeId>(latency.size());
    std::vector<double> per_vehicle(connections.size());
    for (std::size_t v = 0; v < connections.size(); ++v) {
        if (connections[v] < 0 || connections[v] >= n || anchors[v] < 0 || anchors[v] >= n) {
            throw std::invalid_argument("latency_objective: vehicle " + std::to_string(v) +
                                        " lacks a connection or an anchor");
        }
        per_vehicle[v] = latency(static_cast<std::size_t>(connections[v]), static_cast<std::size_t>(anchors[v]));
    }
    if (mode == LatencyMode::p90) {
        return nearest_rank_percentile(std::move(per_vehicle), 0.9);
    }
    if (per_vehicle.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (double value : per_vehicle) {
        total += value;
    }
    return total / static_cast<double>(per_vehicle.size());
}

double deployment_overhead(const Deployment& current, const Deployment& next, double a, double b) {
    // Summed site by site in ascending id order.
    double total = 0.0;
    auto c = current.begin();
    auto n = next.begin();
    while (c != current.end() || n != next.end()) {
        if (n == next.end() || (c != current.end() && *c < *n)) {
            total += b;
            ++c;
        } else if (c == current.end() || *n < *c) {
            total += a;
            ++n;
        } else {
            ++c;
            ++n;
        }
    }
    return total;
}

double reassignment_overhead(std::span<const NodeId> previous, std::span<const NodeId> next,
                             const SquareMatrix<int>& relocation) {
    if (previous.size() != next.size()) {
        throw std::invalid_argument("reassignment_overhead: previous and next assignments differ in size");
    }
    const auto n = static_cast<NodeId>(relocation.size());
    double total = 0.0;
    for (std::size_t v = 0; v < next.size(); ++v) {
        if (previous[v] < 0 || previous[v] >= n) {
            throw std::invalid_argument("reassignment_overhead: vehicle " + std::to_string(v) +
                                        " has no previous assignment");
        }
        if (next[v] < 0 || next[v] >= n) {
            throw std::invalid_argument("reassignment_overhead: vehicle " + std::to_string(v) +
                                        " has no next assignment");
        }
        total += relocation(static_cast<std::size_t>(previous[v]), static_cast<std::size_t>(next[v]));
    }
    return total;
}

double scalarize(double f1, double f2, double f3, const CostModel& cost) {
    return cost.weights.alpha1 * f1 / cost.norm_f1 + cost.weights.alpha2 * f2 / cost.norm_f2 +
           cost.weights.alpha3 * f3 / cost.norm_f3;
}

double planning_objective(const Decision& decision, std::span<const NodeId> predicted,
                          std::span<const NodeId> previous, const Deployment& deployed,
                          const TopologyGraph& graph, const CostModel& cost) {
    double f1 = latency_objective(predicted, decision.anchors, graph.latency_matrix(), LatencyMode::mean);
    double f2 = deployment_overhead(deployed, decision.deployed_next, cost.a, cost.b);
    double f3 = reassignment_overhead(previous, decision.anchors, graph.relocation_matrix());
    return scalarize(f1, f2, f3, cost);
}

std::string to_string(Constraint constraint) {
    switch (constraint) {
        case Constraint::unicity:
            return "unicity";
        case Constraint::coverage:
            return "coverage";
        case Constraint::resource_usage:
            return "resource_usage";
    }
    return "?";
}

std::vector<Violation> validate_decision(const Decision& decision, std::span<const std::string> vehicles,
                                         const CostModel& cost, const TopologyGraph& graph,
                                         bool exempt_count) {
    std::vector<Violation> violations;
    const auto core = graph.core();
    for (std::size_t v = 0; v < vehicles.size(); ++v) {
        if (v >= decision.anchors.size()) {
            violations.push_back({Constraint::unicity, vehicles[v], "no anchor assigned"});
            continue;
        }
        NodeId anchor = decision.anchors[v];
        if (anchor < 0 || anchor > core) {
            violations.push_back({Constraint::unicity, vehicles[v],
                                  "anchor " + std::to_string(anchor) + " is not a graph location"});
        } else if (anchor != core && !decision.deployed_next.contains(anchor)) {
            violations.push_back({Constraint::coverage, vehicles[v],
                                  "assigned to undeployed edge site " + std::to_string(anchor)});
        }
    }
    if (decision.anchors.size() > vehicles.size()) {
        violations.push_back({Constraint::unicity, "-",
                              std::to_string(decision.anchors.size() - vehicles.size()) +
                                  " assignments for unknown vehicles"});
    }
    for (NodeId site : decision.deployed_next) {
        if (site < 0 || site >= core) {
            violations.push_back({Constraint::resource_usage, std::to_string(site),
                                  "deployment outside the edge sites"});
        }
    }
    if (!exempt_count && decision.deployed_next.size() != static_cast<std::size_t>(cost.n_anchor_points)) {
        violations.push_back({Constraint::resource_usage, "-",
                              "deployed " + std::to_string(decision.deployed_next.size()) + " anchors, expected " +
                                  std::to_string(cost.n_anchor_points)});
    }
    return violations;
}

}  // namespace mecanchor
