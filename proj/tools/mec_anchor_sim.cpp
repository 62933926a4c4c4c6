// mec-anchor-sim: graph building, single runs, comparative sweeps and
// predictor evaluation. Data goes to stdout (or --out); diagnostics to stderr.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mecanchor/csv.hpp"
#include "mecanchor/prediction.hpp"
#include "mecanchor/simulator.hpp"
#include "mecanchor/strategies.hpp"
#include "mecanchor/topology.hpp"

namespace {

using namespace mecanchor;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitViolation = 4;

struct CommonFlags {
    std::string trace;
    std::string stations;
    double alpha1 = 0.5;
    double alpha2 = 0.25;
    double alpha3 = 0.25;
    double slot_duration = 5.0;
    double threshold = 500.0;
    double sigma = 9.83;
    double hysteresis = 2.0;
    std::string predictor = "naive";
    std::uint64_t seed = 0;
    std::string slots;
    std::string out;
    std::string decision_log;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    bool lenient = false;
    bool record_runtime = false;
    int core_site = -1;
    double core_link_weight = 1.0;
    std::string config;
};

SlotRange parse_slot_range(const std::string& text) {
    SlotRange range;
    if (text.empty()) {
        return range;
    }
    auto dots = text.find("..");
    if (dots == std::string::npos) {
        throw ConfigError("--slots expects FIRST..LAST");
    }
    try {
        if (dots > 0) {
            range.first = std::stoll(text.substr(0, dots));
        }
        if (dots + 2 < text.size()) {
            range.last = std::stoll(text.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw ConfigError("--slots expects integer bounds, got `" + text + "`");
    }
    return range;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::stringstream stream(text);
    for (std::string item; std::getline(stream, item, ',');) {
        try {
            auto dots = item.find("..");
            if (dots == std::string::npos) {
                values.push_back(std::stoi(item));
                continue;
            }
            int first = std::stoi(item.substr(0, dots));
            std::string rest = item.substr(dots + 2);
            int step = 1;
            if (auto colon = rest.find(':'); colon != std::string::npos) {
                step = std::stoi(rest.substr(colon + 1));
                rest = rest.substr(0, colon);
            }
            int last = std::stoi(rest);
            if (step < 1 || last < first) {
                throw ConfigError("bad range");
            }
            for (int v = first; v <= last; v += step) {
                values.push_back(v);
            }
        } catch (const std::exception&) {
            throw ConfigError("cannot parse list item `" + item + "` (use N, A,B,C or A..B[:STEP])");
        }
    }
    if (values.empty()) {
        throw ConfigError("empty list");
    }
    return values;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    for (std::string item; std::getline(stream, item, ',');) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number `" + item + "`");
        }
    }
    return values;
}

std::vector<StrategyKind> parse_strategy_list(const std::string& text) {
    if (text == "all") {
        return comparison_strategies();
    }
    std::vector<StrategyKind> kinds;
    std::stringstream stream(text);
    for (std::string item; std::getline(stream, item, ',');) {
        kinds.push_back(parse_strategy(item));
    }
    return kinds;
}

void add_graph_flags(CLI::App& cmd, CommonFlags& flags) {
    cmd.add_option("--stations", flags.stations, "Base-station file (`id x y` per line)")->required();
    cmd.add_option("--threshold", flags.threshold, "Neighborhood threshold in meters");
    cmd.add_option("--core-site", flags.core_site, "Site the core attaches to (-1: graph center)");
    cmd.add_option("--core-link-weight", flags.core_link_weight, "Latency of the core link");
}

void add_simulation_flags(CLI::App& cmd, CommonFlags& flags) {
    cmd.add_option("--trace", flags.trace, "Mobility trace (`t id x y speed` per line)")->required();
    add_graph_flags(cmd, flags);
    cmd.add_option("--alpha1", flags.alpha1, "Latency weight");
    cmd.add_option("--alpha2", flags.alpha2, "Deployment-overhead weight");
    cmd.add_option("--alpha3", flags.alpha3, "Reassignment-overhead weight");
    cmd.add_option("--slot-duration", flags.slot_duration, "Slot length in seconds");
    cmd.add_option("--sigma", flags.sigma, "Shadowing standard deviation in dB");
    cmd.add_option("--hysteresis", flags.hysteresis, "Handover hysteresis margin in dB");
    cmd.add_option("--predictor", flags.predictor, "naive, cv, oracle or file:PATH");
    cmd.add_option("--seed", flags.seed, "Random seed")->envname("MEC_ANCHOR_SIM_SEED");
    cmd.add_option("--slots", flags.slots, "Slot range FIRST..LAST (inclusive, either side optional)");
    cmd.add_option("--out", flags.out, "Output CSV path (default: stdout)");
    cmd.add_flag("--lenient", flags.lenient, "Log constraint violations instead of aborting");
    cmd.add_flag("--record-runtime", flags.record_runtime,
                 "Write measured strategy runtimes (otherwise runtime_ms is 0)");
    cmd.add_option("--config", flags.config, "key=value file supplying any flag");
}

RunConfig make_config(const CommonFlags& flags) {
    RunConfig config;
    config.trace_path = flags.trace;
    config.stations_path = flags.stations;
    config.graph.d_threshold = flags.threshold;
    if (flags.core_site >= 0) {
        config.graph.core_attach = flags.core_site;
    }
    config.graph.core_link_weight = flags.core_link_weight;
    config.slot_duration = flags.slot_duration;
    config.slots = parse_slot_range(flags.slots);
    auto& sim = config.simulation;
    sim.cost.weights = {flags.alpha1, flags.alpha2, flags.alpha3};
    sim.radio.sigma_pl = flags.sigma;
    sim.radio.epsilon_hys = flags.hysteresis;
    sim.predictor = PredictorSpec::parse(flags.predictor);
    sim.seed = flags.seed;
    sim.strict = !flags.lenient;
    sim.record_runtime = flags.record_runtime;
    return config;
}

std::shared_ptr<const TopologyGraph> load_graph(const CommonFlags& flags) {
    GraphOptions options;
    options.d_threshold = flags.threshold;
    if (flags.core_site >= 0) {
        options.core_attach = flags.core_site;
    }
    options.core_link_weight = flags.core_link_weight;
    auto graph = std::make_shared<const TopologyGraph>(build_graph(read_sites_file(flags.stations), options));
    if (graph->duplicate_coordinate_pairs() > 0) {
        std::cerr << "warning: " << graph->duplicate_coordinate_pairs() << " site pair(s) share coordinates\n";
    }
    return graph;
}

// Output stream owner: a file when a path is given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw IoError("cannot write " + path);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

int cmd_build_graph(const CommonFlags& flags, const std::string& sites_out) {
    auto graph = load_graph(flags);
    Output edges(flags.out);
    write_edges_csv(edges.stream(), *graph);
    if (!sites_out.empty()) {
        Output sites(sites_out);
        write_sites_csv(sites.stream(), *graph);
    }
    std::cerr << "sites=" << graph->edge_count() << " links=" << graph->site_link_count()
              << " core_attach=" << graph->core_attach() << " diameter=" << csv::format_number(graph->diameter())
              << " mean_site_hops=" << csv::format_number(graph->mean_site_hops()) << '\n';
    return kExitOk;
}

int cmd_run(const CommonFlags& flags, const std::string& strategy, int anchor_points, const std::string& summary) {
    RunConfig config = make_config(flags);
    config.simulation.strategy = parse_strategy(strategy);
    config.simulation.cost.n_anchor_points = anchor_points;
    config.validate();
    auto graph = load_graph(flags);
    Output out(flags.out);
    std::optional<Output> log;
    if (!flags.decision_log.empty()) {
        log.emplace(flags.decision_log);
    }
    RunResult result = run_simulation(config, graph, &out.stream(), log ? &log->stream() : nullptr);
    if (!summary.empty()) {
        Output summary_out(summary);
        write_summary_header(summary_out.stream());
        write_summary_row(summary_out.stream(), summary_row(config, result.summary));
    }
    if (result.malformed_lines > 0) {
        std::cerr << "warning: skipped " << result.malformed_lines << " malformed trace line(s)\n";
    }
    std::cerr << "slots=" << result.summary.slots;
    if (result.summary.defined) {
        std::cerr << " f1_p90_mean=" << csv::format_number(result.summary.f1_p90.mean)
                  << " f2_total=" << csv::format_number(result.summary.total_f2)
                  << " f3_total=" << csv::format_number(result.summary.total_f3);
    } else {
        std::cerr << " summary=undefined";
    }
    std::cerr << '\n';
    return kExitOk;
}

int cmd_compare(const CommonFlags& flags, const std::string& strategies, const std::string& anchor_points,
                const std::string& alpha_sweep) {
    RunConfig base = make_config(flags);
    auto kinds = parse_strategy_list(strategies);
    auto ks = parse_int_list(anchor_points);
    std::vector<Weights> weights{{flags.alpha1, flags.alpha2, flags.alpha3}};
    if (!alpha_sweep.empty()) {
        weights.clear();
        for (double alpha : parse_double_list(alpha_sweep)) {
            weights.push_back({alpha, (1.0 - alpha) / 2.0, (1.0 - alpha) / 2.0});
        }
    }
    std::vector<RunConfig> configs;
    for (auto kind : kinds) {
        for (int k : ks) {
            for (const auto& w : weights) {
                RunConfig config = base;
                config.simulation.strategy = kind;
                config.simulation.cost.n_anchor_points = k;
                config.simulation.cost.weights = w;
                config.validate();
                configs.push_back(config);
            }
        }
    }
    auto graph = load_graph(flags);
    auto rows = sweep(configs, flags.jobs, graph);
    Output out(flags.out);
    write_summary_header(out.stream());
    std::exception_ptr first_failure;
    for (const auto& row : rows) {
        write_summary_row(out.stream(), row);
        if (row.failure) {
            std::cerr << "error: " << to_string(row.strategy) << " k=" << row.n_anchor_points << ": " << row.error
                      << '\n';
            if (!first_failure) {
                first_failure = row.failure;
            }
        }
    }
    out.stream().flush();
    if (first_failure) {
        std::rethrow_exception(first_failure);
    }
    return kExitOk;
}

int cmd_predict_eval(const CommonFlags& flags, const std::string& predictions, const std::string& dump_positions,
                     const std::string& emit_predictions) {
    PredictorSpec spec = predictions.empty() ? PredictorSpec::parse(flags.predictor)
                                             : PredictorSpec{PredictorKind::file_backed, predictions};
    Predictor candidate(spec);
    Predictor naive(PredictorSpec{PredictorKind::naive_last_value, {}});
    const SlotRange range = parse_slot_range(flags.slots);

    std::ifstream trace(flags.trace);
    if (!trace) {
        throw IoError("cannot open trace file: " + flags.trace);
    }
    TraceReader reader(trace);
    Slotifier slotifier(reader, flags.slot_duration, true);

    std::optional<Output> dump;
    std::optional<Output> emit;
    if (!dump_positions.empty()) {
        dump.emplace(dump_positions);
        csv::Writer(dump->stream()).header({"slot", "vehicle_id", "x", "y"});
    }
    if (!emit_predictions.empty()) {
        emit.emplace(emit_predictions);
        csv::Writer(emit->stream()).header({"slot", "vehicle_id", "x", "y"});
    }

    PositionHistory history;
    double naive_sum = 0.0;
    double candidate_sum = 0.0;
    std::size_t matched = 0;
    while (auto slot = slotifier.next()) {
        if (range.first && slot->slot_index < *range.first) {
            continue;
        }
        if (range.last && slot->slot_index > *range.last) {
            break;
        }
        std::vector<std::string> vehicles;
        std::vector<Position> actual;
        for (const auto& [vehicle, position] : slot->positions) {
            if (dump) {
                csv::Writer(dump->stream()).field(slot->slot_index).field(vehicle).field(position.x).field(position.y).end_row();
            }
            if (history.continuing(vehicle, slot->slot_index) != nullptr) {
                vehicles.push_back(vehicle);
                actual.push_back(position);
            }
        }
        if (!vehicles.empty()) {
            auto baseline = naive.predict(vehicles, actual, slot->slot_index, history);
            auto predicted = candidate.predict(vehicles, actual, slot->slot_index, history);
            for (std::size_t v = 0; v < vehicles.size(); ++v) {
                auto squared = [&](const Position& p) {
                    return (p.x - actual[v].x) * (p.x - actual[v].x) + (p.y - actual[v].y) * (p.y - actual[v].y);
                };
                naive_sum += squared(baseline[v]);
                candidate_sum += squared(predicted[v]);
                if (emit) {
                    csv::Writer(emit->stream())
                        .field(slot->slot_index)
                        .field(vehicles[v])
                        .field(predicted[v].x)
                        .field(predicted[v].y)
                        .end_row();
                }
            }
            matched += vehicles.size();
        }
        history.observe(slot->slot_index, slot->positions);
    }
    if (matched == 0) {
        throw IoError("trace has no vehicle present in two consecutive slots; nothing to evaluate");
    }
    const double naive_rmse = std::sqrt(naive_sum / static_cast<double>(matched));
    const double candidate_rmse = std::sqrt(candidate_sum / static_cast<double>(matched));
    Output out(flags.out);
    out.stream() << "samples=" << matched << '\n'
                 << "predictor=naive rmse=" << csv::format_number(naive_rmse) << '\n'
                 << "predictor=" << spec.name() << " rmse=" << csv::format_number(candidate_rmse) << '\n'
                 << "ratio_naive_over_candidate="
                 << csv::format_number(candidate_rmse == 0.0 ? (naive_rmse == 0.0 ? 1.0 : INFINITY)
                                                             : naive_rmse / candidate_rmse)
                 << '\n';
    return kExitOk;
}

// Flags present on the command line, by long name.
std::set<std::string> explicit_flags(const std::vector<std::string>& args) {
    std::set<std::string> names;
    for (const auto& arg : args) {
        if (arg.rfind("--", 0) == 0) {
            names.insert(arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos : arg.find('=') - 2));
        }
    }
    return names;
}

// Prepends key=value pairs from the --config file, skipping keys given explicitly.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (path.empty() || args.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    const auto given = explicit_flags(args);
    std::vector<std::string> injected;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_number) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) {
            key = key.substr(2);
        }
        if (given.contains(key) || key == "config") {
            continue;
        }
        if (value == "true" && (key == "lenient" || key == "record-runtime")) {
            injected.push_back("--" + key);
        } else if (value != "false") {
            injected.push_back("--" + key + "=" + value);
        }
    }
    // Insert right after the subcommand name.
    args.insert(args.begin() + 1, injected.begin(), injected.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anchor-point deployment and vehicle assignment simulator for MEC vehicular scenarios",
                 "mec-anchor-sim"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    CommonFlags flags;
    std::string sites_out;
    std::string strategy;
    int anchor_points = 0;
    std::string summary;
    std::string strategies = "all";
    std::string anchor_list;
    std::string alpha_sweep;
    std::string predictions;
    std::string dump_positions;
    std::string emit_predictions;

    auto* build = app.add_subcommand("build-graph", "Build the backhaul graph and export it as CSV");
    add_graph_flags(*build, flags);
    build->add_option("--out", flags.out, "Edge CSV path `i,j,w` (default: stdout)");
    build->add_option("--sites-out", sites_out, "Site CSV path `id,x,y,is_core`");
    build->add_option("--config", flags.config, "key=value file supplying any flag");

    auto* run = app.add_subcommand("run", "Simulate one strategy and write per-slot metrics");
    add_simulation_flags(*run, flags);
    run->add_option("--strategy", strategy, "Strategy name")->required();
    run->add_option("--anchor-points", anchor_points, "Number of anchor points to deploy")->required();
    run->add_option("--decision-log", flags.decision_log, "Decision log CSV path");
    run->add_option("--summary", summary, "Write the run summary row (compare format) to this path");

    auto* compare = app.add_subcommand("compare", "Run strategy x anchor-point sweeps and write summaries");
    add_simulation_flags(*compare, flags);
    compare->add_option("--strategies", strategies, "Comma-separated strategies or `all`");
    compare->add_option("--anchor-points", anchor_list, "N, A,B,C or A..B[:STEP]")->required();
    compare->add_option("--alpha-sweep", alpha_sweep,
                        "Comma-separated alpha1 values, alpha2 = alpha3 = (1 - alpha1) / 2");
    compare->add_option("--jobs", flags.jobs, "Concurrent runs");

    auto* predict = app.add_subcommand("predict-eval", "Compare a position predictor against the naive baseline");
    predict->add_option("--trace", flags.trace, "Mobility trace (`t id x y speed` per line)")->required();
    predict->add_option("--predictor", flags.predictor, "naive, cv, oracle or file:PATH");
    predict->add_option("--predictions", predictions, "Predictions CSV (same as --predictor file:PATH)");
    predict->add_option("--slot-duration", flags.slot_duration, "Slot length in seconds");
    predict->add_option("--slots", flags.slots, "Slot range FIRST..LAST (inclusive, either side optional)");
    predict->add_option("--out", flags.out, "Report path (default: stdout)");
    predict->add_option("--dump-positions", dump_positions, "Write slotted positions `slot,vehicle_id,x,y`");
    predict->add_option("--emit-predictions", emit_predictions, "Write the predictor's output as a predictions CSV");
    predict->add_option("--config", flags.config, "key=value file supplying any flag");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config_file(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const CLI::App* context = &app;
        for (auto* sub : app.get_subcommands()) {
            context = sub;
        }
        std::cerr << context->help();
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }

    try {
        if (build->parsed()) {
            return cmd_build_graph(flags, sites_out);
        }
        if (run->parsed()) {
            return cmd_run(flags, strategy, anchor_points, summary);
        }
        if (compare->parsed()) {
            return cmd_compare(flags, strategies, anchor_list, alpha_sweep);
        }
        if (predict->parsed()) {
            return cmd_predict_eval(flags, predictions, dump_positions, emit_predictions);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConstraintViolationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitViolation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitConfig;
}
