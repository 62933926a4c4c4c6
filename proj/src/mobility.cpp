#include "mecanchor/mobility.hpp"

#include <charconv>
#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

namespace mecanchor {

void RadioParams::validate() const {
    if (!(beta_pl > 0.0)) {
        throw ConfigError("path-loss slope must be positive");
    }
    if (!(sigma_pl >= 0.0)) {
        throw ConfigError("shadowing sigma must be non-negative");
    }
    if (!(epsilon_hys >= 0.0)) {
        throw ConfigError("hysteresis margin must be non-negative");
    }
}

namespace {

std::optional<double> parse_double(std::string_view token) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        return std::nullopt;
    }
    return value;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

}  // namespace

std::optional<TraceEntry> parse_trace_line(std::string_view line) {
    std::string_view tokens[5];
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) {
            ++i;
        }
        if (i == line.size()) {
            break;
        }
        std::size_t start = i;
        while (i < line.size() && !is_space(line[i])) {
            ++i;
        }
        if (count == 5) {
            return std::nullopt;
        }
        tokens[count++] = line.substr(start, i - start);
    }
    if (count != 5) {
        return std::nullopt;
    }
    auto t = parse_double(tokens[0]);
    auto x = parse_double(tokens[2]);
    auto y = parse_double(tokens[3]);
    auto speed = parse_double(tokens[4]);
    if (!t || !x || !y || !speed || !std::isfinite(*t) || *t < 0.0 || !std::isfinite(*x) ||
        !std::isfinite(*y)) {
        return std::nullopt;
    }
    return TraceEntry{*t, std::string(tokens[1]), *x, *y, *speed};
}

std::optional<TraceEntry> TraceReader::next() {
    while (std::getline(in_, line_)) {
        ++line_number_;
        auto first = line_.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        if (auto entry = parse_trace_line(line_)) {
            return entry;
        }
        if (strict_) {
            throw IoError("trace line " + std::to_string(line_number_) + " is malformed: " + line_);
        }
        ++malformed_;
        if (malformed_ <= 5) {
            std::cerr << "warning: skipping malformed trace line " << line_number_ << '\n';
        }
    }
    if (in_.bad()) {
        throw IoError("failed reading trace stream");
    }
    return std::nullopt;
}

std::int64_t slot_of(double t, double slot_duration) {
    return static_cast<std::int64_t>(std::floor(t / slot_duration));
}

Slotifier::Slotifier(TraceReader& reader, double slot_duration, bool strict)
    : reader_(reader), slot_duration_(slot_duration), strict_(strict) {
    if (!(slot_duration > 0.0) || !std::isfinite(slot_duration)) {
        throw ConfigError("slot duration must be positive");
    }
}

std::optional<TraceEntry> Slotifier::pull() {
    while (auto entry = reader_.next()) {
        if (started_ && entry->t < last_t_) {
            if (strict_) {
                throw IoError("trace timestamps go backwards at t=" + std::to_string(entry->t) +
                              " (after t=" + std::to_string(last_t_) + ", line " +
                              std::to_string(reader_.line_number()) + ")");
            }
            ++out_of_order_;
            continue;
        }
        started_ = true;
        last_t_ = entry->t;
        return entry;
    }
    return std::nullopt;
}

std::optional<SlotPositions> Slotifier::next() {
    if (!pending_) {
        pending_ = pull();
    }
    if (!pending_) {
        return std::nullopt;
    }
    SlotPositions slot;
    slot.slot_index = slot_of(pending_->t, slot_duration_);
    while (pending_ && slot_of(pending_->t, slot_duration_) == slot.slot_index) {
        slot.positions[pending_->vehicle_id] = Position{pending_->x, pending_->y};
        pending_ = pull();
    }
    return slot;
}

double path_loss(double distance_m, const RadioParams& params, double shadow_db) {
    double d = std::max(distance_m, 1.0);
    return params.alpha_pl + 10.0 * params.beta_pl * std::log10(d) + shadow_db;
}

std::uint64_t stable_hash(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                           static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::uint32_t words[2];
    sequence.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

void ShadowingField::draw(std::int64_t slot, std::string_view vehicle_id, std::span<double> out) const {
    if (sigma_ == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    std::mt19937_64 rng(mix_seed(seed_, static_cast<std::uint64_t>(slot), stable_hash(vehicle_id)));
    std::normal_distribution<double> normal(0.0, sigma_);
    for (auto& value : out) {
        value = normal(rng);
    }
}

std::vector<NodeId> attach(std::span<const std::string> vehicles, std::span<const Position> positions,
                           std::span<const NodeId> previous, const TopologyGraph& graph,
                           const RadioParams& params, const ShadowingField& shadowing,
                           std::int64_t slot) {
    if (vehicles.size() != positions.size() || vehicles.size() != previous.size()) {
        throw std::invalid_argument("attach: vehicle, position and previous spans differ in size");
    }
    const auto& sites = graph.sites();
    const std::size_t e = sites.size();
    std::vector<double> shadow(e);
    std::vector<NodeId> result(vehicles.size());
    for (std::size_t v = 0; v < vehicles.size(); ++v) {
        const auto& p = positions[v];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw std::invalid_argument("vehicle " + vehicles[v] + " has a non-finite position");
        }
        shadowing.draw(slot, vehicles[v], shadow);
        const NodeId prev = previous[v];
        NodeId best = kNoNode;
        double best_loss = std::numeric_limits<double>::infinity();
        double prev_loss = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < e; ++s) {
            double loss = path_loss(euclidean(p, sites[s].position()), params, shadow[s]);
            if (static_cast<NodeId>(s) == prev) {
                prev_loss = loss;
                continue;
            }
            if (loss < best_loss) {
                best_loss = loss;
                best = static_cast<NodeId>(s);
            }
        }
        if (prev == kNoNode || prev < 0 || static_cast<std::size_t>(prev) >= e) {
            result[v] = best;
        } else if (best != kNoNode && prev_loss - best_loss > params.epsilon_hys) {
            result[v] = best;
        } else {
            result[v] = prev;
        }
    }
    return result;
}

}  // namespace mecanchor
