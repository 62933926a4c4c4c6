#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mecanchor/mobility.hpp"

namespace mecanchor {

enum class PredictorKind { naive_last_value, constant_velocity, file_backed, oracle };

struct PredictorSpec {
    PredictorKind kind = PredictorKind::naive_last_value;
    std::string path;  // file_backed only

    /// Accepts `naive`, `cv`, `oracle` or `file:PATH`.
    static PredictorSpec parse(const std::string& text);
    std::string name() const;
};

/// Last two positions of every vehicle that was present in the most recent
/// observed slot. Vehicles missing from a slot are dropped, so a vehicle
/// that reappears later starts a fresh track.
class PositionHistory {
public:
    struct Track {
        std::int64_t last_slot = 0;
        Position last;
        std::optional<Position> previous;
    };

    void observe(std::int64_t slot_index, const std::map<std::string, Position>& positions);

    /// Track usable for predicting `slot_index`, i.e. observed in the slot before.
    const Track* continuing(const std::string& vehicle, std::int64_t slot_index) const;

    std::size_t size() const { return tracks_.size(); }

private:
    std::map<std::string, Track> tracks_;
};

using SlotVehicleKey = std::pair<std::int64_t, std::string>;
using KeyedPositions = std::map<SlotVehicleKey, Position>;

/// Predictions file `slot,vehicle_id,x,y`.
KeyedPositions read_predictions_csv(std::istream& in);
KeyedPositions read_predictions_file(const std::string& path);
void write_positions_csv(std::ostream& out, const KeyedPositions& positions);

class Predictor {
public:
    explicit Predictor(PredictorSpec spec);

    const PredictorSpec& spec() const { return spec_; }

    /// Predicted position of every vehicle for `slot_index`. `actual` is
    /// consulted only by the oracle. Vehicles need a continuing track, except
    /// under the oracle.
    std::vector<Position> predict(std::span<const std::string> vehicles, std::span<const Position> actual,
                                  std::int64_t slot_index, const PositionHistory& history) const;

private:
    PredictorSpec spec_;
    KeyedPositions table_;
};

/// X-hat: attachment of predicted positions, with hysteresis measured
/// against the previous slot's real connections.
std::vector<NodeId> predicted_connections(std::span<const std::string> vehicles,
                                          std::span<const Position> predicted,
                                          std::span<const NodeId> previous_real, const TopologyGraph& graph,
                                          const RadioParams& params, const ShadowingField& shadowing,
                                          std::int64_t slot);

struct RmseReport {
    double rmse = 0.0;
    std::size_t matched = 0;
    std::size_t predicted = 0;
    std::size_t actual = 0;
};

/// RMSE of Euclidean position error over the keys present in both maps.
RmseReport prediction_rmse(const KeyedPositions& predicted, const KeyedPositions& actual);

}  // namespace mecanchor
