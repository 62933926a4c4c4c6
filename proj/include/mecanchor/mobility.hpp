#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mecanchor/topology.hpp"
#include "mecanchor/types.hpp"

namespace mecanchor {

struct TraceEntry {
    double t = 0.0;
    std::string vehicle_id;
    double x = 0.0;
    double y = 0.0;
    double speed = 0.0;

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

/// Log-distance path loss with Gaussian shadowing and handover hysteresis.
/// Defaults are the NLOS urban fit (intercept 46.61 dB, slope 3.63,
/// sigma 9.83 dB) and a 2 dB handover margin.
struct RadioParams {
    double alpha_pl = 46.61;
    double beta_pl = 3.63;
    double sigma_pl = 9.83;
    double epsilon_hys = 2.0;

    void validate() const;
};

/// Parses one `t vehicle_id x y speed` record; nullopt when malformed.
std::optional<TraceEntry> parse_trace_line(std::string_view line);

/// Streaming reader over a trace; memory does not grow with trace length.
class TraceReader {
public:
    explicit TraceReader(std::istream& in, bool strict = false) : in_(in), strict_(strict) {}

    std::optional<TraceEntry> next();

    std::size_t malformed_lines() const { return malformed_; }
    std::size_t line_number() const { return line_number_; }

private:
    std::istream& in_;
    bool strict_;
    std::size_t malformed_ = 0;
    std::size_t line_number_ = 0;
    std::string line_;
};

/// Last observed position of every vehicle seen during one slot.
struct SlotPositions {
    std::int64_t slot_index = 0;
    std::map<std::string, Position> positions;
};

/// Groups time-ordered entries into half-open slots [k*d, (k+1)*d).
/// Slots with no entries are not emitted.
class Slotifier {
public:
    Slotifier(TraceReader& reader, double slot_duration, bool strict = true);

    std::optional<SlotPositions> next();

    /// Entries dropped for going back in time (lenient mode only).
    std::size_t out_of_order_entries() const { return out_of_order_; }

private:
    std::optional<TraceEntry> pull();

    TraceReader& reader_;
    double slot_duration_;
    bool strict_;
    std::optional<TraceEntry> pending_;
    double last_t_ = 0.0;
    bool started_ = false;
    std::size_t out_of_order_ = 0;
};

std::int64_t slot_of(double t, double slot_duration);

/// Path loss in dB; distances under 1 m are clamped to 1 m.
double path_loss(double distance_m, const RadioParams& params, double shadow_db);

/// Deterministic shadowing: one i.i.d. N(0, sigma^2) value per
/// (slot, vehicle, site), reproducible from the seed alone.
class ShadowingField {
public:
    ShadowingField(std::uint64_t seed, double sigma) : seed_(seed), sigma_(sigma) {}

    /// Writes one sample per site into `out` (site order).
    void draw(std::int64_t slot, std::string_view vehicle_id, std::span<double> out) const;

    double sigma() const { return sigma_; }

private:
    std::uint64_t seed_;
    double sigma_;
};

std::uint64_t stable_hash(std::string_view text);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Base-station attachment for one slot.
///
/// New vehicles (previous == kNoNode) attach to the minimum path-loss site.
/// Others hand over only when the best alternative beats the current site by
/// more than the hysteresis margin. Path-loss ties go to the lowest site id.
std::vector<NodeId> attach(std::span<const std::string> vehicles, std::span<const Position> positions,
                           std::span<const NodeId> previous, const TopologyGraph& graph,
                           const RadioParams& params, const ShadowingField& shadowing,
                           std::int64_t slot);

}  // namespace mecanchor
