#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mecanchor/mobility.hpp"
#include "mecanchor/objective.hpp"
#include "mecanchor/prediction.hpp"
#include "mecanchor/strategies.hpp"
#include "mecanchor/topology.hpp"

namespace mecanchor {

/// A strategy decision broke a constraint in strict mode (CLI exit code 4).
class ConstraintViolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One slot as seen by the simulator. Vehicles are in ascending id order.
struct SlotFrame {
    std::int64_t slot_index = 0;
    std::vector<std::string> vehicles;
    std::vector<Position> positions;
    std::vector<NodeId> previous_connections;  // kNoNode for vehicles new this slot
    std::vector<NodeId> connections;           // X
    std::vector<NodeId> predicted;             // X-hat; real attachment for new vehicles
};

struct SlotMetrics {
    std::int64_t slot_index = 0;
    double f1_p90 = 0.0;
    double f1_mean = 0.0;
    double f2 = 0.0;
    double f3 = 0.0;
    double scalarized = 0.0;
    double runtime_ms = 0.0;
    std::size_t vehicle_count = 0;
    std::size_t handover_count = 0;
};

struct CostParams {
    Weights weights;
    double a = 1.0;
    double b = 0.1;
    int n_anchor_points = 1;
};

struct StepResult {
    NetworkState next;
    Decision decision;  // after forcing new vehicles onto the core
    std::vector<NodeId> previous_anchors;
    SlotMetrics metrics;
};

/// Runs the strategy on one frame and carries the state forward. Metrics use
/// the real connections; the strategy only sees X-hat. Vehicles absent from
/// `state` are new and served by the core this slot.
StepResult step(const NetworkState& state, const SlotFrame& frame, Strategy& strategy,
                const TopologyGraph& graph, const CostParams& params, bool strict = true,
                bool record_runtime = false);

struct SimulationOptions {
    StrategyKind strategy = StrategyKind::overhead_aware_greedy_average;
    CostParams cost;
    RadioParams radio;
    PredictorSpec predictor;
    std::uint64_t seed = 0;
    bool strict = true;
    bool record_runtime = false;
};

/// Stateful slot-by-slot driver: attachment, prediction, decision, metrics.
class Simulator {
public:
    Simulator(std::shared_ptr<const TopologyGraph> graph, SimulationOptions options,
              std::ostream* decision_log = nullptr);

    SlotFrame build_frame(const SlotPositions& slot);
    SlotMetrics advance(const SlotPositions& slot);

    const NetworkState& state() const { return state_; }
    const TopologyGraph& graph() const { return *graph_; }
    const SimulationOptions& options() const { return options_; }

private:
    void log_decision(std::int64_t slot, const NetworkState& before, const StepResult& result,
                      std::span<const std::string> vehicles);

    std::shared_ptr<const TopologyGraph> graph_;
    SimulationOptions options_;
    std::unique_ptr<Strategy> strategy_;
    Predictor predictor_;
    ShadowingField shadowing_;
    PositionHistory history_;
    std::map<std::string, NodeId> last_connections_;
    std::optional<std::int64_t> last_slot_;
    NetworkState state_;
    std::ostream* decision_log_;
};

struct MetricSummary {
    double mean = 0.0;
    double ci95 = 0.0;  // half-width, Student t
};

struct RunSummary {
    bool defined = false;
    std::size_t slots = 0;
    MetricSummary vehicles;
    MetricSummary f1_p90;
    MetricSummary f1_mean;
    MetricSummary f2;
    MetricSummary f3;
    MetricSummary scalarized;
    MetricSummary runtime_ms;
    MetricSummary handovers;
    double total_f2 = 0.0;
    double total_f3 = 0.0;
};

MetricSummary summarize(std::span<const double> values);
RunSummary summarize(std::span<const SlotMetrics> timeline);

struct RunResult {
    std::vector<SlotMetrics> timeline;
    RunSummary summary;
    std::size_t malformed_lines = 0;
};

using SlotSource = std::function<std::optional<SlotPositions>()>;

struct SlotRange {
    std::optional<std::int64_t> first;
    std::optional<std::int64_t> last;
};

/// Drives a simulator over every slot the source yields within `range`.
/// Metric rows are streamed to `metrics_csv` (header included) when given.
RunResult simulate(std::shared_ptr<const TopologyGraph> graph, const SlotSource& source,
                   const SimulationOptions& options, const SlotRange& range = {},
                   std::ostream* metrics_csv = nullptr, std::ostream* decision_log = nullptr);

struct RunConfig {
    std::string trace_path;
    std::string stations_path;
    GraphOptions graph;
    double slot_duration = 5.0;
    SimulationOptions simulation;
    SlotRange slots;
    bool strict_trace = false;

    void validate() const;
};

/// File-backed run: stations -> graph, trace -> slots -> simulate.
RunResult run_simulation(const RunConfig& config, std::ostream* metrics_csv = nullptr,
                         std::ostream* decision_log = nullptr);

/// Same as above on a prebuilt graph.
RunResult run_simulation(const RunConfig& config, std::shared_ptr<const TopologyGraph> graph,
                         std::ostream* metrics_csv = nullptr, std::ostream* decision_log = nullptr);

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const SlotMetrics& metrics, const SimulationOptions& options);

struct SweepRow {
    StrategyKind strategy;
    int n_anchor_points = 0;
    Weights weights;
    std::uint64_t seed = 0;
    RunSummary summary;
    std::string error;  // empty on success
    std::exception_ptr failure;
};

/// Runs each config (up to `jobs` at once) and returns one row per config,
/// sorted by (strategy, anchor points, alpha1, seed).
std::vector<SweepRow> sweep(const std::vector<RunConfig>& configs, unsigned jobs,
                            std::shared_ptr<const TopologyGraph> graph = nullptr);

SweepRow summary_row(const RunConfig& config, const RunSummary& summary);

void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const SweepRow& row);

}  // namespace mecanchor
