#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mecanchor/topology.hpp"
#include "mecanchor/types.hpp"

namespace mecanchor {

enum class LatencyMode { p90, mean };

struct Weights {
    double alpha1 = 0.5;
    double alpha2 = 0.25;
    double alpha3 = 0.25;

    void validate() const;
};

/// Scalarization weights, overhead costs and normalizers for one slot.
struct CostModel {
    double a = 1.0;    // deploy
    double b = 0.1;    // remove
    Weights weights;
    int n_anchor_points = 1;
    double norm_f1 = 1.0;  // graph diameter
    double norm_f2 = 1.0;  // N * max(a, b), N = nodes incl. core
    double norm_f3 = 1.0;  // V * max(o)

    /// Normalizers derived from the graph; V = 0 is normalized as V = 1.
    static CostModel make(const TopologyGraph& graph, const Weights& weights, double a, double b,
                          int n_anchor_points, std::size_t vehicle_count);

    void validate(std::size_t edge_count) const;
};

/// Deployed anchors y and assignments Z carried between slots.
struct NetworkState {
    Deployment deployed;
    std::map<std::string, NodeId> assignments;
};

/// Strategy output for one slot. `anchors[v]` serves the v-th vehicle of the
/// slot (vehicles in ascending id order).
struct Decision {
    Deployment deployed_next;
    std::vector<NodeId> anchors;
};

/// ceil(p * n)-th smallest value (1-based); 0 for an empty sample.
double nearest_rank_percentile(std::vector<double> values, double p);

/// Per-vehicle latency l(connected site, anchor) aggregated as p90 or mean.
double latency_objective(std::span<const NodeId> connections, std::span<const NodeId> anchors,
                         const SquareMatrix<double>& latency, LatencyMode mode);

/// a per newly deployed site plus b per removed site.
double deployment_overhead(const Deployment& current, const Deployment& next, double a, double b);

/// Sum of o(previous anchor, next anchor) over vehicles.
double reassignment_overhead(std::span<const NodeId> previous, std::span<const NodeId> next,
                             const SquareMatrix<int>& relocation);

double scalarize(double f1, double f2, double f3, const CostModel& cost);

/// Objective optimized inside the overhead-aware heuristic and the exact
/// oracle: mean latency in place of the 90th percentile.
double planning_objective(const Decision& decision, std::span<const NodeId> predicted,
                          std::span<const NodeId> previous, const Deployment& deployed,
                          const TopologyGraph& graph, const CostModel& cost);

enum class Constraint { unicity, coverage, resource_usage };

struct Violation {
    Constraint constraint;
    std::string subject;
    std::string detail;
};

std::string to_string(Constraint constraint);

/// Checks single assignment, coverage of assigned edge anchors and the
/// deployment count. `exempt_count` skips the count check (centralized).
std::vector<Violation> validate_decision(const Decision& decision, std::span<const std::string> vehicles,
                                         const CostModel& cost, const TopologyGraph& graph,
                                         bool exempt_count);

}  // namespace mecanchor
