#include "mecanchor/prediction.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "mecanchor/csv.hpp"

namespace mecanchor {

PredictorSpec PredictorSpec::parse(const std::string& text) {
    if (text == "naive") {
        return {PredictorKind::naive_last_value, {}};
    }
    if (text == "cv") {
        return {PredictorKind::constant_velocity, {}};
    }
    if (text == "oracle") {
        return {PredictorKind::oracle, {}};
    }
    if (text.rfind("file:", 0) == 0 && text.size() > 5) {
        return {PredictorKind::file_backed, text.substr(5)};
    }
    throw ConfigError("unknown predictor `" + text + "` (expected naive, cv, oracle or file:PATH)");
}

std::string PredictorSpec::name() const {
    switch (kind) {
        case PredictorKind::naive_last_value:
            return "naive";
        case PredictorKind::constant_velocity:
            return "cv";
        case PredictorKind::oracle:
            return "oracle";
        case PredictorKind::file_backed:
            return "file:" + path;
    }
    return "?";
}

void PositionHistory::observe(std::int64_t slot_index, const std::map<std::string, Position>& positions) {
    std::map<std::string, Track> next;
    for (const auto& [vehicle, position] : positions) {
        Track track{slot_index, position, std::nullopt};
        auto it = tracks_.find(vehicle);
        if (it != tracks_.end() && it->second.last_slot == slot_index - 1) {
            track.previous = it->second.last;
        }
        next.emplace_hint(next.end(), vehicle, track);
    }
    tracks_ = std::move(next);
}

const PositionHistory::Track* PositionHistory::continuing(const std::string& vehicle,
                                                          std::int64_t slot_index) const {
    auto it = tracks_.find(vehicle);
    if (it == tracks_.end() || it->second.last_slot != slot_index - 1) {
        return nullptr;
    }
    return &it->second;
}

KeyedPositions read_predictions_csv(std::istream& in) {
    KeyedPositions table;
    std::string line;
    std::size_t line_number = 0;
    if (!std::getline(in, line)) {
        throw IoError("predictions file is empty (missing header)");
    }
    ++line_number;
    auto header = csv::split_record(line);
    if (header != std::vector<std::string>{"slot", "vehicle_id", "x", "y"}) {
        throw IoError("predictions header must be `slot,vehicle_id,x,y`");
    }
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line == "\r") {
            continue;
        }
        auto fields = csv::split_record(line);
        try {
            if (fields.size() != 4) {
                throw std::invalid_argument("field count");
            }
            std::size_t used = 0;
            std::int64_t slot = std::stoll(fields[0], &used);
            Position p{std::stod(fields[2]), std::stod(fields[3])};
            table[{slot, fields[1]}] = p;
        } catch (const std::exception&) {
            throw IoError("predictions line " + std::to_string(line_number) + " is malformed: " + line);
        }
    }
    return table;
}

KeyedPositions read_predictions_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open predictions file: " + path);
    }
    return read_predictions_csv(in);
}

void write_positions_csv(std::ostream& out, const KeyedPositions& positions) {
    csv::Writer writer(out);
    writer.header({"slot", "vehicle_id", "x", "y"});
    for (const auto& [key, p] : positions) {
        writer.field(key.first).field(key.second).field(p.x).field(p.y).end_row();
    }
}

Predictor::Predictor(PredictorSpec spec) : spec_(std::move(spec)) {
    if (spec_.kind == PredictorKind::file_backed) {
        table_ = read_predictions_file(spec_.path);
    }
}

std::vector<Position> Predictor::predict(std::span<const std::string> vehicles,
                                         std::span<const Position> actual, std::int64_t slot_index,
                                         const PositionHistory& history) const {
    if (vehicles.size() != actual.size()) {
        throw std::invalid_argument("predict: vehicle and position spans differ in size");
    }
    std::vector<Position> out(vehicles.size());
    for (std::size_t v = 0; v < vehicles.size(); ++v) {
        if (spec_.kind == PredictorKind::oracle) {
            out[v] = actual[v];
            continue;
        }
        if (spec_.kind == PredictorKind::file_backed) {
            auto it = table_.find({slot_index, vehicles[v]});
            if (it == table_.end()) {
                throw IoError("predictions file " + spec_.path + " has no entry for slot " +
                              std::to_string(slot_index) + ", vehicle " + vehicles[v]);
            }
            out[v] = it->second;
            continue;
        }
        const auto* track = history.continuing(vehicles[v], slot_index);
        if (track == nullptr) {
            throw std::invalid_argument("no position history for vehicle " + vehicles[v] +
                                        " before slot " + std::to_string(slot_index));
        }
        out[v] = track->last;
        if (spec_.kind == PredictorKind::constant_velocity && track->previous) {
            out[v].x += track->last.x - track->previous->x;
            out[v].y += track->last.y - track->previous->y;
        }
    }
    return out;
}

std::vector<NodeId> predicted_connections(std::span<const std::string> vehicles,
                                          std::span<const Position> predicted,
                                          std::span<const NodeId> previous_real, const TopologyGraph& graph,
                                          const RadioParams& params, const ShadowingField& shadowing,
                                          std::int64_t slot) {
    return attach(vehicles, predicted, previous_real, graph, params, shadowing, slot);
}

RmseReport prediction_rmse(const KeyedPositions& predicted, const KeyedPositions& actual) {
    RmseReport report;
    report.predicted = predicted.size();
    report.actual = actual.size();
    double sum = 0.0;
    for (const auto& [key, p] : predicted) {
        auto it = actual.find(key);
        if (it == actual.end()) {
            continue;
        }
        double dx = p.x - it->second.x;
        double dy = p.y - it->second.y;
        sum += dx * dx + dy * dy;
        ++report.matched;
    }
    if (report.matched == 0) {
        throw std::invalid_argument("prediction_rmse: no (slot, vehicle) keys in common");
    }
    report.rmse = std::sqrt(sum / static_cast<double>(report.matched));
    return report;
}

}  // namespace mecanchor
