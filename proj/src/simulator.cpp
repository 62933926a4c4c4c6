#include "mecanchor/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "mecanchor/csv.hpp"

namespace mecanchor {

namespace {

std::string anchor_label(NodeId anchor, const TopologyGraph& graph) {
    return anchor == graph.core() ? std::string("core") : std::to_string(anchor);
}

void repair(Decision& decision, std::span<const std::string> vehicles, const TopologyGraph& graph) {
    decision.anchors.resize(vehicles.size(), graph.core());
    for (auto& anchor : decision.anchors) {
        if (anchor < 0 || anchor > graph.core() ||
            (anchor != graph.core() && !decision.deployed_next.contains(anchor))) {
            anchor = graph.core();
        }
    }
}

}  // namespace

StepResult step(const NetworkState& state, const SlotFrame& frame, Strategy& strategy,
                const TopologyGraph& graph, const CostParams& params, bool strict, bool record_runtime) {
    const std::size_t v_count = frame.vehicles.size();
    const NodeId core = graph.core();
    const CostModel cost =
        CostModel::make(graph, params.weights, params.a, params.b, params.n_anchor_points, v_count);

    StepResult result;
    result.previous_anchors.resize(v_count, core);
    std::vector<bool> is_new(v_count, true);
    for (std::size_t v = 0; v < v_count; ++v) {
        auto it = state.assignments.find(frame.vehicles[v]);
        if (it != state.assignments.end()) {
            result.previous_anchors[v] = it->second;
            is_new[v] = false;
        }
    }

    SlotInput input{frame.predicted, result.previous_anchors, state.deployed, frame.slot_index};
    const auto start = std::chrono::steady_clock::now();
    result.decision = strategy.decide(input, cost);
    const auto stop = std::chrono::steady_clock::now();

    const bool centralized = strategy.kind() == StrategyKind::centralized;
    auto violations = validate_decision(result.decision, frame.vehicles, cost, graph, centralized);
    if (!violations.empty()) {
        std::string message = "slot " + std::to_string(frame.slot_index) + ": " + to_string(strategy.kind()) +
                              " violated " + std::to_string(violations.size()) + " constraint(s); first: " +
                              to_string(violations.front().constraint) + " " + violations.front().subject +
                              " (" + violations.front().detail + ")";
        if (strict) {
            throw ConstraintViolationError(message);
        }
        std::cerr << "warning: " << message << '\n';
        repair(result.decision, frame.vehicles, graph);
    }
    for (std::size_t v = 0; v < v_count; ++v) {
        if (is_new[v]) {
            result.decision.anchors[v] = core;
        }
    }

    auto& m = result.metrics;
    m.slot_index = frame.slot_index;
    m.vehicle_count = v_count;
    m.f1_p90 = latency_objective(frame.connections, result.decision.anchors, graph.latency_matrix(), LatencyMode::p90);
    m.f1_mean = latency_objective(frame.connections, result.decision.anchors, graph.latency_matrix(), LatencyMode::mean);
    m.f2 = deployment_overhead(state.deployed, result.decision.deployed_next, params.a, params.b);
    m.f3 = reassignment_overhead(result.previous_anchors, result.decision.anchors, graph.relocation_matrix());
    m.scalarized = scalarize(m.f1_p90, m.f2, m.f3, cost);
    m.runtime_ms = record_runtime ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
    for (std::size_t v = 0; v < v_count; ++v) {
        if (frame.previous_connections[v] != kNoNode && frame.previous_connections[v] != frame.connections[v]) {
            ++m.handover_count;
        }
    }

    result.next.deployed = result.decision.deployed_next;
    for (std::size_t v = 0; v < v_count; ++v) {
        result.next.assignments.emplace_hint(result.next.assignments.end(), frame.vehicles[v],
                                             result.decision.anchors[v]);
    }
    return result;
}

Simulator::Simulator(std::shared_ptr<const TopologyGraph> graph, SimulationOptions options,
                     std::ostream* decision_log)
    : graph_(std::move(graph)),
      options_(std::move(options)),
      strategy_(make_strategy(options_.strategy, *graph_, options_.cost.n_anchor_points, options_.seed)),
      predictor_(options_.predictor),
      shadowing_(mix_seed(options_.seed, 0x5eed), options_.radio.sigma_pl),
      decision_log_(decision_log) {
    options_.radio.validate();
    options_.cost.weights.validate();
    if (decision_log_ != nullptr) {
        csv::Writer(*decision_log_).header({"slot", "kind", "subject", "from", "to"});
    }
}

SlotFrame Simulator::build_frame(const SlotPositions& slot) {
    SlotFrame frame;
    frame.slot_index = slot.slot_index;
    const bool contiguous = last_slot_.has_value() && *last_slot_ == slot.slot_index - 1;
    for (const auto& [vehicle, position] : slot.positions) {
        frame.vehicles.push_back(vehicle);
        frame.positions.push_back(position);
        NodeId previous = kNoNode;
        if (contiguous) {
            auto it = last_connections_.find(vehicle);
            if (it != last_connections_.end()) {
                previous = it->second;
            }
        }
        frame.previous_connections.push_back(previous);
    }
    frame.connections = attach(frame.vehicles, frame.positions, frame.previous_connections, *graph_,
                               options_.radio, shadowing_, slot.slot_index);

    frame.predicted = frame.connections;
    std::vector<std::string> continuing;
    std::vector<Position> continuing_positions;
    std::vector<NodeId> continuing_previous;
    std::vector<std::size_t> where;
    for (std::size_t v = 0; v < frame.vehicles.size(); ++v) {
        if (frame.previous_connections[v] != kNoNode) {
            continuing.push_back(frame.vehicles[v]);
            continuing_positions.push_back(frame.positions[v]);
            continuing_previous.push_back(frame.previous_connections[v]);
            where.push_back(v);
        }
    }
    if (!continuing.empty()) {
        auto predicted_positions = predictor_.predict(continuing, continuing_positions, slot.slot_index, history_);
        auto predicted = predicted_connections(continuing, predicted_positions, continuing_previous, *graph_,
                                               options_.radio, shadowing_, slot.slot_index);
        for (std::size_t i = 0; i < where.size(); ++i) {
            frame.predicted[where[i]] = predicted[i];
        }
    }

    history_.observe(slot.slot_index, slot.positions);
    last_connections_.clear();
    for (std::size_t v = 0; v < frame.vehicles.size(); ++v) {
        last_connections_.emplace_hint(last_connections_.end(), frame.vehicles[v], frame.connections[v]);
    }
    last_slot_ = slot.slot_index;
    return frame;
}

SlotMetrics Simulator::advance(const SlotPositions& slot) {
    const bool contiguous = last_slot_.has_value() && *last_slot_ == slot.slot_index - 1;
    if (!contiguous) {
        state_.assignments.clear();  // everybody rejoins through the core
    }
    SlotFrame frame = build_frame(slot);
    StepResult result = step(state_, frame, *strategy_, *graph_, options_.cost, options_.strict,
                             options_.record_runtime);
    if (decision_log_ != nullptr) {
        log_decision(frame.slot_index, state_, result, frame.vehicles);
    }
    state_ = std::move(result.next);
    return result.metrics;
}

void Simulator::log_decision(std::int64_t slot, const NetworkState& before, const StepResult& result,
                             std::span<const std::string> vehicles) {
    csv::Writer writer(*decision_log_);
    const auto& next = result.decision.deployed_next;
    for (NodeId site : next) {
        if (!before.deployed.contains(site)) {
            writer.field(slot).field("deploy").field(site).field("").field("").end_row();
        }
    }
    for (NodeId site : before.deployed) {
        if (!next.contains(site)) {
            writer.field(slot).field("remove").field(site).field("").field("").end_row();
        }
    }
    for (std::size_t v = 0; v < vehicles.size(); ++v) {
        if (result.previous_anchors[v] != result.decision.anchors[v]) {
            writer.field(slot)
                .field("assign")
                .field(vehicles[v])
                .field(anchor_label(result.previous_anchors[v], *graph_))
                .field(anchor_label(result.decision.anchors[v], *graph_))
                .end_row();
        }
    }
}

MetricSummary summarize(std::span<const double> values) {
    MetricSummary summary;
    if (values.empty()) {
        return summary;
    }
    double total = 0.0;
    for (double value : values) {
        total += value;
    }
    const auto n = static_cast<double>(values.size());
    summary.mean = total / n;
    if (values.size() < 2) {
        return summary;
    }
    double squares = 0.0;
    for (double value : values) {
        squares += (value - summary.mean) * (value - summary.mean);
    }
    const double stddev = std::sqrt(squares / (n - 1.0));
    boost::math::students_t distribution(n - 1.0);
    const double t = boost::math::quantile(boost::math::complement(distribution, 0.025));
    summary.ci95 = t * stddev / std::sqrt(n);
    return summary;
}

RunSummary summarize(std::span<const SlotMetrics> timeline) {
    RunSummary summary;
    summary.slots = timeline.size();
    summary.defined = !timeline.empty();
    if (!summary.defined) {
        return summary;
    }
    auto column = [&](auto member) {
        std::vector<double> values;
        values.reserve(timeline.size());
        for (const auto& m : timeline) {
            values.push_back(static_cast<double>(m.*member));
        }
        return values;
    };
    summary.vehicles = summarize(column(&SlotMetrics::vehicle_count));
    summary.f1_p90 = summarize(column(&SlotMetrics::f1_p90));
    summary.f1_mean = summarize(column(&SlotMetrics::f1_mean));
    summary.f2 = summarize(column(&SlotMetrics::f2));
    summary.f3 = summarize(column(&SlotMetrics::f3));
    summary.scalarized = summarize(column(&SlotMetrics::scalarized));
    summary.runtime_ms = summarize(column(&SlotMetrics::runtime_ms));
    summary.handovers = summarize(column(&SlotMetrics::handover_count));
    for (const auto& m : timeline) {
        summary.total_f2 += m.f2;
        summary.total_f3 += m.f3;
    }
    return summary;
}

void write_metrics_header(std::ostream& out) {
    csv::Writer(out).header({"slot", "strategy", "n_anchor_points", "alpha1", "alpha2", "alpha3", "vehicles",
                             "f1_p90", "f1_mean", "f2", "f3", "scalarized", "runtime_ms", "handovers"});
}

void write_metrics_row(std::ostream& out, const SlotMetrics& m, const SimulationOptions& options) {
    csv::Writer(out)
        .field(m.slot_index)
        .field(to_string(options.strategy))
        .field(options.cost.n_anchor_points)
        .field(options.cost.weights.alpha1)
        .field(options.cost.weights.alpha2)
        .field(options.cost.weights.alpha3)
        .field(m.vehicle_count)
        .field(m.f1_p90)
        .field(m.f1_mean)
        .field(m.f2)
        .field(m.f3)
        .field(m.scalarized)
        .field(m.runtime_ms)
        .field(m.handover_count)
        .end_row();
}

RunResult simulate(std::shared_ptr<const TopologyGraph> graph, const SlotSource& source,
                   const SimulationOptions& options, const SlotRange& range, std::ostream* metrics_csv,
                   std::ostream* decision_log) {
    Simulator simulator(std::move(graph), options, decision_log);
    RunResult result;
    if (metrics_csv != nullptr) {
        write_metrics_header(*metrics_csv);
    }
    while (auto slot = source()) {
        if (range.first && slot->slot_index < *range.first) {
            continue;
        }
        if (range.last && slot->slot_index > *range.last) {
            break;
        }
        SlotMetrics metrics;
        try {
            metrics = simulator.advance(*slot);
        } catch (const ConstraintViolationError&) {
            throw;
        } catch (const IoError& error) {
            throw IoError("slot " + std::to_string(slot->slot_index) + ": " + error.what());
        }
        if (metrics_csv != nullptr) {
            write_metrics_row(*metrics_csv, metrics, options);
        }
        result.timeline.push_back(metrics);
    }
    result.summary = summarize(result.timeline);
    return result;
}

void RunConfig::validate() const {
    if (trace_path.empty()) {
        throw ConfigError("a trace file is required");
    }
    if (!(slot_duration > 0.0)) {
        throw ConfigError("slot duration must be positive");
    }
    if (!(graph.d_threshold > 0.0)) {
        throw ConfigError("neighborhood threshold must be positive");
    }
    if (slots.first && slots.last && *slots.first > *slots.last) {
        throw ConfigError("slot range is empty");
    }
    simulation.radio.validate();
    simulation.cost.weights.validate();
    if (simulation.cost.a < 0.0 || simulation.cost.b < 0.0 || std::max(simulation.cost.a, simulation.cost.b) <= 0.0) {
        throw ConfigError("deploy/removal costs must be non-negative and not both zero");
    }
}

RunResult run_simulation(const RunConfig& config, std::ostream* metrics_csv, std::ostream* decision_log) {
    config.validate();
    auto graph = std::make_shared<const TopologyGraph>(build_graph(read_sites_file(config.stations_path), config.graph));
    return run_simulation(config, std::move(graph), metrics_csv, decision_log);
}

RunResult run_simulation(const RunConfig& config, std::shared_ptr<const TopologyGraph> graph,
                         std::ostream* metrics_csv, std::ostream* decision_log) {
    config.validate();
    std::ifstream trace(config.trace_path);
    if (!trace) {
        throw IoError("cannot open trace file: " + config.trace_path);
    }
    TraceReader reader(trace, config.strict_trace);
    Slotifier slotifier(reader, config.slot_duration, true);
    SlotSource source = [&slotifier] { return slotifier.next(); };
    RunResult result = simulate(std::move(graph), source, config.simulation, config.slots, metrics_csv, decision_log);
    result.malformed_lines = reader.malformed_lines();
    return result;
}

SweepRow summary_row(const RunConfig& config, const RunSummary& summary) {
    return {config.simulation.strategy, config.simulation.cost.n_anchor_points, config.simulation.cost.weights,
            config.simulation.seed, summary, {}, nullptr};
}

std::vector<SweepRow> sweep(const std::vector<RunConfig>& configs, unsigned jobs,
                            std::shared_ptr<const TopologyGraph> graph) {
    if (configs.empty()) {
        throw ConfigError("sweep needs at least one configuration");
    }
    if (!graph) {
        const auto& first = configs.front();
        first.validate();
        graph = std::make_shared<const TopologyGraph>(build_graph(read_sites_file(first.stations_path), first.graph));
    }
    std::vector<SweepRow> rows(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            rows[i] = summary_row(configs[i], {});
            try {
                rows[i].summary = run_simulation(configs[i], graph).summary;
            } catch (const std::exception& error) {
                rows[i].error = error.what();
                rows[i].failure = std::current_exception();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
    std::vector<std::thread> threads;
    for (unsigned j = 1; j < jobs; ++j) {
        threads.emplace_back(worker);
    }
    worker();
    for (auto& thread : threads) {
        thread.join();
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& lhs, const SweepRow& rhs) {
        return std::tuple(static_cast<int>(lhs.strategy), lhs.n_anchor_points, lhs.weights.alpha1, lhs.seed) <
               std::tuple(static_cast<int>(rhs.strategy), rhs.n_anchor_points, rhs.weights.alpha1, rhs.seed);
    });
    return rows;
}

void write_summary_header(std::ostream& out) {
    std::vector<std::string> names = {"strategy", "n_anchor_points", "alpha1", "alpha2", "alpha3", "seed", "slots"};
    for (const char* metric : {"vehicles", "f1_p90", "f1_mean", "f2", "f3", "scalarized", "runtime_ms", "handovers"}) {
        names.push_back(std::string(metric) + "_mean");
        names.push_back(std::string(metric) + "_ci95");
    }
    names.insert(names.end(), {"f2_total", "f3_total", "error"});
    csv::Writer(out).header(names);
}

void write_summary_row(std::ostream& out, const SweepRow& row) {
    csv::Writer writer(out);
    writer.field(to_string(row.strategy))
        .field(row.n_anchor_points)
        .field(row.weights.alpha1)
        .field(row.weights.alpha2)
        .field(row.weights.alpha3)
        .field(std::to_string(row.seed))
        .field(row.summary.slots);
    const auto& s = row.summary;
    for (const MetricSummary* metric :
         {&s.vehicles, &s.f1_p90, &s.f1_mean, &s.f2, &s.f3, &s.scalarized, &s.runtime_ms, &s.handovers}) {
        if (s.defined) {
            writer.field(metric->mean).field(metric->ci95);
        } else {
            writer.field("").field("");
        }
    }
    if (s.defined) {
        writer.field(s.total_f2).field(s.total_f3);
    } else {
        writer.field("").field("");
    }
    writer.field(row.error).end_row();
}

}  // namespace mecanchor
